#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "evotree/dataset.hpp"
#include "evotree/tree.hpp"

namespace evotree {

// A tree together with the attribute layout it was trained against. The
// serialized form carries both, so a model file is self-describing.
struct Model {
  Schema schema;
  DecisionTree tree;
};

// JSON, stable key order, shortest round-trip numbers:
//   {
//     "class_index": 3,
//     "format_version": 1,
//     "root": {"test": {"attr": "Sand", "op": "le", "value": 54},
//              "true": {"leaf": "c"}, "false": {...}},
//     "schema": [{"name": "Sand", "type": "numeric"}, ...,
//                {"name": "TextureClass", "type": "nominal", "values": [...]}]
//   }
// Serializing and re-reading a model yields an identical tree and schema.
std::string serialize_model(const Model& model);
Model deserialize_model(std::string_view text);

// Graphviz rendering: internal nodes as boxes with their test, leaves with
// their class label, edges labelled yes/no. Node ids follow preorder.
std::string to_dot(const DecisionTree& tree, const Schema& schema);

// One line per rule: "IF <cond> AND <cond> THEN <class>". Conditions taken
// on the false branch are negated in place (> for <=, != for =). A bare leaf
// renders as "IF TRUE THEN <class>".
std::string render_rules(const std::vector<Rule>& rules, const Schema& schema);

}  // namespace evotree
