#include "evotree/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "evotree/errors.hpp"

namespace evotree {

bool NodeTest::operator==(const NodeTest& o) const {
  if (op != o.op || attribute != o.attribute) return false;
  if (op == Op::ThresholdLE)
    return std::bit_cast<std::uint64_t>(threshold) == std::bit_cast<std::uint64_t>(o.threshold);
  return category == o.category;
}

NodePtr make_leaf(std::int32_t label) {
  auto n = std::make_shared<Node>();
  n->label = label;
  return n;
}

NodePtr make_internal(NodeTest test, NodePtr yes, NodePtr no) {
  if (!yes || !no) throw std::invalid_argument("internal node needs both children");
  auto n = std::make_shared<Node>();
  n->test = test;
  n->yes = std::move(yes);
  n->no = std::move(no);
  return n;
}

std::size_t node_count(const NodePtr& node) {
  if (!node) return 0;
  if (node->is_leaf()) return 1;
  return 1 + node_count(node->yes) + node_count(node->no);
}

std::size_t node_height(const NodePtr& node) {
  if (!node || node->is_leaf()) return 0;
  return 1 + std::max(node_height(node->yes), node_height(node->no));
}

bool nodes_equal(const NodePtr& a, const NodePtr& b) {
  if (a.get() == b.get()) return true;
  if (!a || !b) return false;
  if (a->is_leaf() != b->is_leaf()) return false;
  if (a->is_leaf()) return a->label == b->label;
  return *a->test == *b->test && nodes_equal(a->yes, b->yes) && nodes_equal(a->no, b->no);
}

namespace {

void validate_node(const Node* n, const Schema& schema, std::size_t depth, std::size_t& count,
                   std::size_t& height) {
  ++count;
  height = std::max(height, depth);
  if (n->is_leaf()) {
    if (n->yes || n->no) throw std::invalid_argument("leaf node with children");
    if (n->label < 0 || static_cast<std::size_t>(n->label) >= schema.n_classes())
      throw std::invalid_argument("leaf label out of range");
    return;
  }
  if (!n->yes || !n->no) throw std::invalid_argument("internal node missing a child");
  const NodeTest& t = *n->test;
  if (t.attribute >= schema.attributes().size())
    throw std::invalid_argument("test references an unknown attribute");
  if (t.attribute == schema.class_index())
    throw std::invalid_argument("test references the class attribute");
  const AttributeSpec& attr = schema.attributes()[t.attribute];
  if (t.op == NodeTest::Op::ThresholdLE) {
    if (attr.kind != AttributeKind::Numeric)
      throw std::invalid_argument("threshold test on non-numeric attribute '" + attr.name + "'");
    if (!std::isfinite(t.threshold)) throw std::invalid_argument("non-finite threshold");
  } else {
    if (attr.kind != AttributeKind::Nominal)
      throw std::invalid_argument("category test on non-nominal attribute '" + attr.name + "'");
    if (t.category < 0 || static_cast<std::size_t>(t.category) >= attr.categories.size())
      throw std::invalid_argument("test category out of range for attribute '" + attr.name + "'");
  }
  validate_node(n->yes.get(), schema, depth + 1, count, height);
  validate_node(n->no.get(), schema, depth + 1, count, height);
}

}  // namespace

DecisionTree::DecisionTree(NodePtr root, const Schema& schema)
    : root_(std::move(root)), schema_fingerprint_(schema.fingerprint()), size_(0), height_(0) {
  if (!root_) throw std::invalid_argument("tree needs a root");
  validate_node(root_.get(), schema, 0, size_, height_);
}

std::int32_t classify(const DecisionTree& tree, const Row& row) {
  const Node* cur = tree.root().get();
  while (!cur->is_leaf()) {
    const NodeTest& t = *cur->test;
    if (t.attribute >= row.size())
      throw SchemaMismatchError("row has fewer values than the tree expects");
    const Cell& cell = row[t.attribute];
    if (cell.is_missing()) throw DataError("missing value reaches a tree test");
    bool go_yes = false;
    if (t.op == NodeTest::Op::ThresholdLE) {
      if (cell.kind != Cell::Kind::Numeric)
        throw SchemaMismatchError("threshold test applied to a non-numeric value");
      go_yes = cell.num <= t.threshold;
    } else {
      if (cell.kind != Cell::Kind::Nominal)
        throw SchemaMismatchError("category test applied to a non-nominal value");
      go_yes = cell.cat == t.category;
    }
    cur = (go_yes ? cur->yes : cur->no).get();
  }
  return cur->label;
}

ValuePool ValuePool::from_dataset(const Dataset& dataset) {
  ValuePool pool;
  const auto& attrs = dataset.attributes();
  pool.values_.resize(attrs.size());
  for (std::size_t i = 0; i < attrs.size(); ++i) {
    if (attrs[i].kind != AttributeKind::Numeric) continue;
    auto& vals = pool.values_[i];
    for (const Row& row : dataset.rows()) {
      if (!row[i].is_missing()) vals.push_back(row[i].num);
    }
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  }
  return pool;
}

DecisionTree random_tree(const Schema& schema, const ValuePool& pool, RandomSource& rng) {
  std::vector<std::size_t> usable;
  for (std::size_t i : schema.predictor_indices()) {
    const AttributeSpec& a = schema.attributes()[i];
    if (a.kind == AttributeKind::Nominal || !pool.values_for(i).empty()) usable.push_back(i);
  }
  if (usable.empty()) throw DataError("no attribute has any usable value to test");

  const std::size_t attr = usable[rng.next_below(usable.size())];
  const AttributeSpec& a = schema.attributes()[attr];
  NodeTest test = (a.kind == AttributeKind::Numeric)
                      ? NodeTest::threshold_le(
                            attr, pool.values_for(attr)[rng.next_below(pool.values_for(attr).size())])
                      : NodeTest::equals_category(
                            attr, static_cast<std::int32_t>(rng.next_below(a.categories.size())));
  const auto label_yes = static_cast<std::int32_t>(rng.next_below(schema.n_classes()));
  const auto label_no = static_cast<std::int32_t>(rng.next_below(schema.n_classes()));
  return DecisionTree(make_internal(test, make_leaf(label_yes), make_leaf(label_no)), schema);
}

NodePtr subtree_at(const NodePtr& root, std::size_t index) {
  if (index == 0) return root;
  if (root->is_leaf()) throw std::out_of_range("subtree index out of range");
  const std::size_t yes_count = node_count(root->yes);
  if (index <= yes_count) return subtree_at(root->yes, index - 1);
  return subtree_at(root->no, index - 1 - yes_count);
}

NodePtr replace_subtree(const NodePtr& root, std::size_t index, const NodePtr& replacement) {
  if (index == 0) return replacement;
  if (root->is_leaf()) throw std::out_of_range("subtree index out of range");
  const std::size_t yes_count = node_count(root->yes);
  if (index <= yes_count)
    return make_internal(*root->test, replace_subtree(root->yes, index - 1, replacement),
                         root->no);
  return make_internal(*root->test, root->yes,
                       replace_subtree(root->no, index - 1 - yes_count, replacement));
}

namespace {

void collect_rules(const NodePtr& node, std::vector<RuleCondition>& path,
                   std::vector<Rule>& out) {
  if (node->is_leaf()) {
    out.push_back(Rule{path, node->label});
    return;
  }
  path.push_back(RuleCondition{*node->test, true});
  collect_rules(node->yes, path, out);
  path.back().expected = false;
  collect_rules(node->no, path, out);
  path.pop_back();
}

}  // namespace

std::vector<Rule> extract_rules(const DecisionTree& tree) {
  std::vector<Rule> out;
  std::vector<RuleCondition> path;
  collect_rules(tree.root(), path, out);
  return out;
}

namespace {

bool routes_yes(const NodeTest& t, const Row& row) {
  const Cell& cell = row[t.attribute];
  if (cell.is_missing()) throw DataError("missing value reaches a tree test");
  if (t.op == NodeTest::Op::ThresholdLE) return cell.num <= t.threshold;
  return cell.cat == t.category;
}

std::int32_t majority_label(const Dataset& data, const std::vector<std::size_t>& rows,
                            std::size_t n_classes) {
  std::vector<std::size_t> counts(n_classes, 0);
  for (std::size_t r : rows) ++counts[static_cast<std::size_t>(data.class_of(r))];
  std::size_t best = 0;
  for (std::size_t c = 1; c < n_classes; ++c) {
    if (counts[c] > counts[best]) best = c;
  }
  return static_cast<std::int32_t>(best);
}

struct PruneResult {
  NodePtr node;
  std::size_t correct;
};

// `inherited` is the majority label of the nearest ancestor that still had
// pruning rows; it labels collapsed nodes that no row reaches.
PruneResult prune_node(const NodePtr& node, const Dataset& data,
                       const std::vector<std::size_t>& rows, std::int32_t inherited) {
  const std::int32_t majority =
      rows.empty() ? inherited : majority_label(data, rows, data.n_classes());
  if (node->is_leaf()) {
    std::size_t correct = 0;
    for (std::size_t r : rows) {
      if (data.class_of(r) == node->label) ++correct;
    }
    return PruneResult{node, correct};
  }

  std::vector<std::size_t> yes_rows, no_rows;
  for (std::size_t r : rows) {
    (routes_yes(*node->test, data.rows()[r]) ? yes_rows : no_rows).push_back(r);
  }
  const PruneResult yes = prune_node(node->yes, data, yes_rows, majority);
  const PruneResult no = prune_node(node->no, data, no_rows, majority);
  const std::size_t keep_correct = yes.correct + no.correct;

  std::size_t prune_correct = 0;
  for (std::size_t r : rows) {
    if (data.class_of(r) == majority) ++prune_correct;
  }
  if (prune_correct >= keep_correct) return PruneResult{make_leaf(majority), prune_correct};
  if (yes.node.get() == node->yes.get() && no.node.get() == node->no.get())
    return PruneResult{node, keep_correct};
  return PruneResult{make_internal(*node->test, yes.node, no.node), keep_correct};
}

}  // namespace

DecisionTree prune(const DecisionTree& tree, const Dataset& pruning_set) {
  if (tree.schema_fingerprint() != pruning_set.schema().fingerprint())
    throw SchemaMismatchError("pruning set does not match the tree's attribute layout");
  if (pruning_set.n_rows() == 0) return tree;
  std::vector<std::size_t> all(pruning_set.n_rows());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const PruneResult result = prune_node(tree.root(), pruning_set, all, 0);
  return DecisionTree(result.node, pruning_set.schema());
}

}  // namespace evotree
