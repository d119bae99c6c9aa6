#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "evotree/dataset.hpp"
#include "evotree/rng.hpp"

namespace evotree {

// Test held by an internal node. ThresholdLE sends a row to the true branch
// when value <= threshold (inclusive); EqualsCategory when the value equals
// the category.
struct NodeTest {
  enum class Op : std::uint8_t { ThresholdLE, EqualsCategory };

  static NodeTest threshold_le(std::size_t attribute, double threshold) {
    return NodeTest{Op::ThresholdLE, attribute, threshold, -1};
  }
  static NodeTest equals_category(std::size_t attribute, std::int32_t category) {
    return NodeTest{Op::EqualsCategory, attribute, 0.0, category};
  }

  bool operator==(const NodeTest& o) const;  // thresholds compared bitwise

  Op op = Op::ThresholdLE;
  std::size_t attribute = 0;
  double threshold = 0.0;
  std::int32_t category = -1;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

// Immutable node: either a leaf carrying a class label or an internal node
// with a test and two children. Subtrees are shared freely between trees, so
// nodes are never modified after construction.
struct Node {
  std::optional<NodeTest> test;
  std::int32_t label = -1;  // leaf only
  NodePtr yes;
  NodePtr no;

  bool is_leaf() const { return !test.has_value(); }
};

NodePtr make_leaf(std::int32_t label);
NodePtr make_internal(NodeTest test, NodePtr yes, NodePtr no);

std::size_t node_count(const NodePtr& node);
std::size_t node_height(const NodePtr& node);
bool nodes_equal(const NodePtr& a, const NodePtr& b);

// A validated tree bound to the attribute layout it was built against.
// Validation checks that every internal node has both children, tests
// reference existing attributes with matching kinds, category and label
// indices are in range, and thresholds are finite.
class DecisionTree {
 public:
  DecisionTree(NodePtr root, const Schema& schema);

  const NodePtr& root() const { return root_; }
  std::uint64_t schema_fingerprint() const { return schema_fingerprint_; }
  std::size_t size() const { return size_; }      // node count; always odd
  std::size_t height() const { return height_; }  // edges on longest path; leaf = 0

  bool operator==(const DecisionTree& o) const {
    return schema_fingerprint_ == o.schema_fingerprint_ && nodes_equal(root_, o.root_);
  }

 private:
  NodePtr root_;
  std::uint64_t schema_fingerprint_;
  std::size_t size_;
  std::size_t height_;
};

// Routes the row from the root to a leaf and returns the leaf's label.
// Throws SchemaMismatchError when the row does not fit the tree's tests and
// DataError when a test reads a missing value.
std::int32_t classify(const DecisionTree& tree, const Row& row);

// Distinct observed values per numeric attribute, for drawing thresholds.
// Missing cells are skipped. Values are sorted ascending.
class ValuePool {
 public:
  static ValuePool from_dataset(const Dataset& dataset);

  const std::vector<double>& values_for(std::size_t attribute) const {
    return values_[attribute];
  }

 private:
  std::vector<std::vector<double>> values_;
};

// Minimal random tree: one internal node testing a random predictor with a
// random observed value (numeric) or random category (nominal), and two
// random-label leaves. Predictors whose value pool is empty are excluded;
// if no predictor is usable, throws DataError.
DecisionTree random_tree(const Schema& schema, const ValuePool& pool, RandomSource& rng);

// Subtree addressing for structural operators: nodes are numbered in
// preorder (node first, then the true branch, then the false branch),
// starting at 0 for the root.
NodePtr subtree_at(const NodePtr& root, std::size_t index);
NodePtr replace_subtree(const NodePtr& root, std::size_t index, const NodePtr& replacement);

// One root-to-leaf path flattened into a conjunction. `expected` records
// which branch the path took through each test.
struct RuleCondition {
  NodeTest test;
  bool expected = true;
};

struct Rule {
  std::vector<RuleCondition> conditions;
  std::int32_t label = -1;
};

// All root-to-leaf paths, depth first, true branch before false branch.
// Replaying the rules in order reproduces classify() exactly.
std::vector<Rule> extract_rules(const DecisionTree& tree);

// Bottom-up reduced-error pruning against a held-out set: an internal node
// collapses to a leaf labelled with the majority class of the pruning rows
// reaching it whenever that does not lower accuracy on those rows (ties
// prune). Nodes reached by no pruning rows collapse using the nearest
// ancestor that had rows. Returns an equally-or-smaller tree whose accuracy
// on the pruning set never drops.
DecisionTree prune(const DecisionTree& tree, const Dataset& pruning_set);

}  // namespace evotree
