#include "evotree/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "evotree/errors.hpp"
#include "evotree/population_eval.hpp"

namespace evotree {

void EvolutionConfig::validate() const {
  if (population_size < 2) throw ConfigError("population size must be at least 2");
  if (!(crossover_prob >= 0.0 && crossover_prob <= 1.0))
    throw ConfigError("crossover probability must be in [0, 1]");
  if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
    throw ConfigError("mutation probability must be in [0, 1]");
  if (!(replacement_fraction > 0.0 && replacement_fraction <= 1.0))
    throw ConfigError("replacement fraction must be in (0, 1]");
  if (!(size_bias_x > 0.0) || !std::isfinite(size_bias_x))
    throw ConfigError("size bias must be a positive finite number");
  if (elitism >= population_size)
    throw ConfigError("elitism must be smaller than the population size");
  if (max_tree_size != 0 && max_tree_size < 3)
    throw ConfigError("max tree size must be 0 (automatic) or at least 3");
}

std::size_t select_parent(const std::vector<double>& fitnesses, RandomSource& rng) {
  double total = 0.0;
  for (double f : fitnesses) total += f;
  if (total <= 0.0) return rng.next_below(fitnesses.size());
  const double r = rng.next_unit() * total;
  double cum = 0.0;
  for (std::size_t i = 0; i < fitnesses.size(); ++i) {
    cum += fitnesses[i];
    if (r < cum) return i;
  }
  return fitnesses.size() - 1;  // r landed on the accumulated rounding edge
}

std::pair<DecisionTree, DecisionTree> crossover(const DecisionTree& a, const DecisionTree& b,
                                                double prob, const Schema& schema,
                                                RandomSource& rng) {
  if (rng.next_unit() >= prob) return {a, b};
  const std::size_t ia = rng.next_below(a.size());
  const std::size_t ib = rng.next_below(b.size());
  NodePtr sub_a = subtree_at(a.root(), ia);
  NodePtr sub_b = subtree_at(b.root(), ib);
  return {DecisionTree(replace_subtree(a.root(), ia, sub_b), schema),
          DecisionTree(replace_subtree(b.root(), ib, sub_a), schema)};
}

std::pair<DecisionTree, DecisionTree> crossover_capped(const DecisionTree& a,
                                                       const DecisionTree& b, double prob,
                                                       std::size_t max_size,
                                                       const Schema& schema, RandomSource& rng) {
  if (rng.next_unit() >= prob) return {a, b};
  // The two point draws are sequenced explicitly; an argument list would
  // leave their order to the compiler and break run-for-run determinism.
  auto cut = [&] {
    const std::size_t ia = rng.next_below(a.size());
    const std::size_t ib = rng.next_below(b.size());
    NodePtr sub_a = subtree_at(a.root(), ia);
    NodePtr sub_b = subtree_at(b.root(), ib);
    return std::make_pair(DecisionTree(replace_subtree(a.root(), ia, sub_b), schema),
                          DecisionTree(replace_subtree(b.root(), ib, sub_a), schema));
  };
  auto children = cut();
  if (children.first.size() > max_size || children.second.size() > max_size) {
    children = cut();
    if (children.first.size() > max_size) children.first = a;
    if (children.second.size() > max_size) children.second = b;
  }
  return children;
}

namespace {

NodeTest draw_test(const Schema& schema, const ValuePool& pool,
                   const std::vector<std::size_t>& usable, RandomSource& rng) {
  const std::size_t attr = usable[rng.next_below(usable.size())];
  const AttributeSpec& a = schema.attributes()[attr];
  if (a.kind == AttributeKind::Numeric) {
    const auto& values = pool.values_for(attr);
    return NodeTest::threshold_le(attr, values[rng.next_below(values.size())]);
  }
  return NodeTest::equals_category(attr,
                                   static_cast<std::int32_t>(rng.next_below(a.categories.size())));
}

NodePtr mutate_node(const NodePtr& node, const Schema& schema, const ValuePool& pool,
                    const std::vector<std::size_t>& usable, double prob, RandomSource& rng) {
  const bool hit = rng.next_unit() < prob;
  if (node->is_leaf()) {
    if (!hit) return node;
    return make_leaf(static_cast<std::int32_t>(rng.next_below(schema.n_classes())));
  }
  const NodeTest test = hit ? draw_test(schema, pool, usable, rng) : *node->test;
  NodePtr yes = mutate_node(node->yes, schema, pool, usable, prob, rng);
  NodePtr no = mutate_node(node->no, schema, pool, usable, prob, rng);
  if (!hit && yes.get() == node->yes.get() && no.get() == node->no.get()) return node;
  return make_internal(test, std::move(yes), std::move(no));
}

std::vector<std::size_t> usable_predictors(const Schema& schema, const ValuePool& pool) {
  std::vector<std::size_t> usable;
  for (std::size_t i : schema.predictor_indices()) {
    if (schema.attributes()[i].kind == AttributeKind::Nominal || !pool.values_for(i).empty())
      usable.push_back(i);
  }
  return usable;
}

}  // namespace

DecisionTree mutate(const DecisionTree& tree, const Schema& schema, const ValuePool& pool,
                    double prob, RandomSource& rng) {
  const std::vector<std::size_t> usable = usable_predictors(schema, pool);
  if (usable.empty()) throw DataError("no attribute has any usable value to test");
  return DecisionTree(mutate_node(tree.root(), schema, pool, usable, prob, rng), schema);
}

namespace {

// Indices sorted best first; equal fitness keeps the lower index first, so
// ordering never depends on sort internals.
std::vector<std::size_t> rank_by_fitness(const std::vector<double>& fit) {
  std::vector<std::size_t> order(fit.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&fit](std::size_t i, std::size_t j) { return fit[i] > fit[j]; });
  return order;
}

}  // namespace

EvolveResult evolve(const EvolutionConfig& config, const Dataset& train, const Dataset* test,
                    const ProgressSink& sink, int threads) {
  config.validate();
  if (train.n_rows() == 0) throw DataError("training set is empty");
  if (test != nullptr && test->schema().fingerprint() != train.schema().fingerprint())
    throw SchemaMismatchError("test set does not match the training attribute layout");

  const Schema& schema = train.schema();
  const ValuePool pool = ValuePool::from_dataset(train);
  const std::size_t n = config.population_size;
  const std::size_t max_size =
      config.max_tree_size != 0
          ? config.max_tree_size
          : 10 * schema.attributes().size() * schema.n_classes();
  SplitMix64 rng(config.seed);

  std::vector<DecisionTree> population;
  population.reserve(n);
  for (std::size_t i = 0; i < n; ++i) population.push_back(random_tree(schema, pool, rng));

  std::vector<double> acc(n), fit(n);
  evaluate_population(population, train, config.size_bias_x, acc, fit, threads);

  std::size_t best_idx = rank_by_fitness(fit)[0];
  DecisionTree best = population[best_idx];
  double best_fit = fit[best_idx];
  double best_acc = acc[best_idx];

  EvolveResult result{best, {}};
  result.history.reserve(config.generations + 1);

  const auto record = [&](std::size_t generation) {
    GenerationStats stats;
    stats.generation = generation;
    stats.best_fitness = best_fit;
    // The exact mean never exceeds the maximum; clamping removes summation
    // rounding, which can otherwise push the mean of a uniform population one
    // ulp above it.
    const double avg =
        std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(fit.size());
    stats.avg_fitness = std::min(avg, *std::max_element(fit.begin(), fit.end()));
    stats.best_size = best.size();
    stats.train_accuracy = best_acc;
    if (test != nullptr) stats.test_accuracy = accuracy(best, *test);
    result.history.push_back(stats);
    if (sink) sink(stats);
  };
  record(0);

  const std::size_t n_replace =
      std::min(static_cast<std::size_t>(
                   std::ceil(config.replacement_fraction * static_cast<double>(n))),
               n - config.elitism);

  for (std::size_t g = 1; g <= config.generations; ++g) {
    const std::vector<std::size_t> order = rank_by_fitness(fit);

    std::vector<DecisionTree> offspring;
    offspring.reserve(n_replace);
    while (offspring.size() < n_replace) {
      const std::size_t pa = select_parent(fit, rng);
      const std::size_t pb = select_parent(fit, rng);
      auto children = crossover_capped(population[pa], population[pb], config.crossover_prob,
                                       max_size, schema, rng);
      DecisionTree c1 = mutate(children.first, schema, pool, config.mutation_prob, rng);
      DecisionTree c2 = mutate(children.second, schema, pool, config.mutation_prob, rng);
      offspring.push_back(std::move(c1));
      if (offspring.size() < n_replace) offspring.push_back(std::move(c2));
    }

    // Overwrite the worst slots in place; elites are outside this range
    // because n_replace <= n - elitism.
    for (std::size_t k = 0; k < n_replace; ++k)
      population[order[n - 1 - k]] = std::move(offspring[k]);

    evaluate_population(population, train, config.size_bias_x, acc, fit, threads);

    const std::size_t gen_best = rank_by_fitness(fit)[0];
    if (fit[gen_best] > best_fit) {
      best = population[gen_best];
      best_fit = fit[gen_best];
      best_acc = acc[gen_best];
    }
    record(g);
  }

  result.best = best;
  return result;
}

}  // namespace evotree
