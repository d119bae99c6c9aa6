#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "evotree/dataset.hpp"
#include "evotree/rng.hpp"
#include "evotree/tree.hpp"

namespace evotree {

struct EvolutionConfig {
  std::size_t population_size = 100;
  std::size_t generations = 100;
  double crossover_prob = 0.99;
  double mutation_prob = 0.01;
  double replacement_fraction = 0.25;
  double size_bias_x = 1000.0;
  std::size_t elitism = 1;
  std::uint64_t seed = 0;
  // 0 = automatic: 10 * attribute count * class count.
  std::size_t max_tree_size = 0;

  void validate() const;  // throws ConfigError
};

struct GenerationStats {
  std::size_t generation = 0;
  double best_fitness = 0.0;
  double avg_fitness = 0.0;
  std::size_t best_size = 0;
  double train_accuracy = 0.0;
  std::optional<double> test_accuracy;
};

// Fitness-proportional choice over the population; returns the chosen index.
// Falls back to a uniform choice when total fitness is zero.
std::size_t select_parent(const std::vector<double>& fitnesses, RandomSource& rng);

// Subtree exchange: with probability `prob` a uniformly chosen node in each
// parent (leaves included) roots the swapped subtree; otherwise the children
// are clones. Node counts are conserved across the pair.
std::pair<DecisionTree, DecisionTree> crossover(const DecisionTree& a, const DecisionTree& b,
                                                double prob, const Schema& schema,
                                                RandomSource& rng);

// Crossover with a size cap: when a child exceeds max_size the crossover
// points are redrawn once; a child still over the cap is replaced by its
// parent.
std::pair<DecisionTree, DecisionTree> crossover_capped(const DecisionTree& a,
                                                       const DecisionTree& b, double prob,
                                                       std::size_t max_size,
                                                       const Schema& schema, RandomSource& rng);

// Per-node payload mutation, preorder, shape preserving: each node
// independently with probability `prob` gets a freshly drawn payload (a new
// random test for internal nodes, a new random label for leaves). Exactly
// one decision draw is consumed per node.
DecisionTree mutate(const DecisionTree& tree, const Schema& schema, const ValuePool& pool,
                    double prob, RandomSource& rng);

struct EvolveResult {
  DecisionTree best;
  std::vector<GenerationStats> history;
};

using ProgressSink = std::function<void(const GenerationStats&)>;

// Generational run. Generation 0 is the evaluated initial random population;
// each later generation replaces the worst ceil(replacement_fraction * N)
// individuals (never the elites) with offspring bred by selection, capped
// crossover, and mutation. Stats track the best individual seen so far;
// avg_fitness averages the current population. The test set, when given,
// only adds the test_accuracy column. Results are identical for any
// `threads` value; threads <= 0 uses the runtime default.
EvolveResult evolve(const EvolutionConfig& config, const Dataset& train,
                    const Dataset* test = nullptr, const ProgressSink& sink = nullptr,
                    int threads = 0);

}  // namespace evotree
