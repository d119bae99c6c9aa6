#include "evotree/tree_io.hpp"

#include <json.hpp>

#include "evotree/errors.hpp"
#include "evotree/util.hpp"

namespace evotree {

namespace {

using nlohmann::json;

json node_to_json(const NodePtr& node, const Schema& schema) {
  json out;
  if (node->is_leaf()) {
    out["leaf"] = schema.class_attribute().categories[static_cast<std::size_t>(node->label)];
    return out;
  }
  const NodeTest& t = *node->test;
  const AttributeSpec& attr = schema.attributes()[t.attribute];
  json test;
  test["attr"] = attr.name;
  if (t.op == NodeTest::Op::ThresholdLE) {
    test["op"] = "le";
    test["value"] = t.threshold;
  } else {
    test["op"] = "eq";
    test["value"] = attr.categories[static_cast<std::size_t>(t.category)];
  }
  out["test"] = std::move(test);
  out["true"] = node_to_json(node->yes, schema);
  out["false"] = node_to_json(node->no, schema);
  return out;
}

const json& require(const json& obj, const char* key, const char* where) {
  const auto it = obj.find(key);
  if (it == obj.end())
    throw ParseError(std::string("model: missing '") + key + "' in " + where);
  return *it;
}

NodePtr node_from_json(const json& obj, const Schema& schema) {
  if (!obj.is_object()) throw ParseError("model: tree node is not an object");
  if (obj.contains("leaf")) {
    const json& leaf = obj["leaf"];
    if (!leaf.is_string()) throw ParseError("model: leaf label is not a string");
    const auto& cats = schema.class_attribute().categories;
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (cats[i] == leaf.get<std::string>()) return make_leaf(static_cast<std::int32_t>(i));
    }
    throw ParseError("model: leaf label '" + leaf.get<std::string>() + "' is not a class");
  }
  const json& test = require(obj, "test", "tree node");
  const json& attr_name = require(test, "attr", "node test");
  const json& op = require(test, "op", "node test");
  const json& value = require(test, "value", "node test");
  if (!attr_name.is_string()) throw ParseError("model: test attribute is not a string");
  if (!op.is_string()) throw ParseError("model: test op is not a string");

  const auto& attrs = schema.attributes();
  std::size_t attr_index = attrs.size();
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].name == attr_name.get<std::string>()) {
      attr_index = i;
      break;
    }
  }
  if (attr_index == attrs.size())
    throw ParseError("model: unknown attribute '" + attr_name.get<std::string>() + "'");

  NodeTest t{};
  const std::string op_s = op.get<std::string>();
  if (op_s == "le") {
    if (!value.is_number()) throw ParseError("model: threshold value is not a number");
    t = NodeTest::threshold_le(attr_index, value.get<double>());
  } else if (op_s == "eq") {
    if (!value.is_string()) throw ParseError("model: category value is not a string");
    const auto& cats = attrs[attr_index].categories;
    std::size_t cat = cats.size();
    for (std::size_t i = 0; i < cats.size(); ++i) {
      if (cats[i] == value.get<std::string>()) {
        cat = i;
        break;
      }
    }
    if (cat == cats.size())
      throw ParseError("model: category '" + value.get<std::string>() +
                       "' not declared for attribute '" + attrs[attr_index].name + "'");
    t = NodeTest::equals_category(attr_index, static_cast<std::int32_t>(cat));
  } else {
    throw ParseError("model: unknown test op '" + op_s + "'");
  }
  return make_internal(t, node_from_json(require(obj, "true", "tree node"), schema),
                       node_from_json(require(obj, "false", "tree node"), schema));
}

}  // namespace

std::string serialize_model(const Model& model) {
  if (model.tree.schema_fingerprint() != model.schema.fingerprint())
    throw SchemaMismatchError("model tree does not match the model schema");
  json out;
  out["format_version"] = 1;
  out["class_index"] = model.schema.class_index();
  json schema = json::array();
  for (const auto& attr : model.schema.attributes()) {
    json a;
    a["name"] = attr.name;
    if (attr.kind == AttributeKind::Numeric) {
      a["type"] = "numeric";
    } else {
      a["type"] = "nominal";
      a["values"] = attr.categories;
    }
    schema.push_back(std::move(a));
  }
  out["schema"] = std::move(schema);
  out["root"] = node_to_json(model.tree.root(), model.schema);
  return out.dump(2) + "\n";
}

Model deserialize_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("model: top level is not an object");
  const json& version = require(doc, "format_version", "model");
  if (!version.is_number_integer() || version.get<int>() != 1)
    throw ParseError("model: unsupported format_version");

  const json& schema_arr = require(doc, "schema", "model");
  if (!schema_arr.is_array()) throw ParseError("model: schema is not an array");
  std::vector<AttributeSpec> attrs;
  for (const json& a : schema_arr) {
    if (!a.is_object()) throw ParseError("model: schema entry is not an object");
    AttributeSpec spec;
    const json& name = require(a, "name", "schema entry");
    const json& type = require(a, "type", "schema entry");
    if (!name.is_string() || !type.is_string())
      throw ParseError("model: schema entry fields must be strings");
    spec.name = name.get<std::string>();
    const std::string type_s = type.get<std::string>();
    if (type_s == "numeric") {
      spec.kind = AttributeKind::Numeric;
    } else if (type_s == "nominal") {
      spec.kind = AttributeKind::Nominal;
      const json& values = require(a, "values", "schema entry");
      if (!values.is_array()) throw ParseError("model: nominal values is not an array");
      for (const json& v : values) {
        if (!v.is_string()) throw ParseError("model: nominal value is not a string");
        spec.categories.push_back(v.get<std::string>());
      }
    } else {
      throw ParseError("model: unknown attribute type '" + type_s + "'");
    }
    attrs.push_back(std::move(spec));
  }

  const json& class_index = require(doc, "class_index", "model");
  if (!class_index.is_number_unsigned() && !class_index.is_number_integer())
    throw ParseError("model: class_index is not an integer");
  const auto ci = class_index.get<std::int64_t>();
  if (ci < 0 || static_cast<std::size_t>(ci) >= attrs.size())
    throw ParseError("model: class_index out of range");

  try {
    Schema schema(std::move(attrs), static_cast<std::size_t>(ci));
    NodePtr root = node_from_json(require(doc, "root", "model"), schema);
    DecisionTree tree(std::move(root), schema);
    return Model{std::move(schema), std::move(tree)};
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("model: ") + e.what());
  }
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string condition_text(const NodeTest& t, bool expected, const Schema& schema) {
  const AttributeSpec& attr = schema.attributes()[t.attribute];
  if (t.op == NodeTest::Op::ThresholdLE)
    return attr.name + (expected ? " <= " : " > ") + format_double(t.threshold);
  return attr.name + (expected ? " = " : " != ") +
         attr.categories[static_cast<std::size_t>(t.category)];
}

void dot_node(const NodePtr& node, const Schema& schema, std::size_t& next, std::string& out) {
  const std::size_t id = next++;
  if (node->is_leaf()) {
    out += "  n" + std::to_string(id) + " [label=\"" +
           dot_escape(schema.class_attribute().categories[static_cast<std::size_t>(node->label)]) +
           "\"];\n";
    return;
  }
  out += "  n" + std::to_string(id) + " [shape=box, label=\"" +
         dot_escape(condition_text(*node->test, true, schema)) + "\"];\n";
  const std::size_t yes_id = next;
  dot_node(node->yes, schema, next, out);
  const std::size_t no_id = next;
  dot_node(node->no, schema, next, out);
  out += "  n" + std::to_string(id) + " -> n" + std::to_string(yes_id) + " [label=\"yes\"];\n";
  out += "  n" + std::to_string(id) + " -> n" + std::to_string(no_id) + " [label=\"no\"];\n";
}

}  // namespace

std::string to_dot(const DecisionTree& tree, const Schema& schema) {
  if (tree.schema_fingerprint() != schema.fingerprint())
    throw SchemaMismatchError("tree does not match the given attribute layout");
  std::string out = "digraph decision_tree {\n";
  std::size_t next = 0;
  dot_node(tree.root(), schema, next, out);
  out += "}\n";
  return out;
}

std::string render_rules(const std::vector<Rule>& rules, const Schema& schema) {
  std::string out;
  for (const Rule& rule : rules) {
    out += "IF ";
    if (rule.conditions.empty()) {
      out += "TRUE";
    } else {
      for (std::size_t i = 0; i < rule.conditions.size(); ++i) {
        if (i != 0) out += " AND ";
        out += condition_text(rule.conditions[i].test, rule.conditions[i].expected, schema);
      }
    }
    out += " THEN " +
           schema.class_attribute().categories[static_cast<std::size_t>(rule.label)] + "\n";
  }
  return out;
}

}  // namespace evotree
