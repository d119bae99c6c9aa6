#include <doctest.h>

#include <bit>

#include "evotree/errors.hpp"
#include "evotree/evolve.hpp"
#include "evotree/population_eval.hpp"
#include "evotree/soilgen.hpp"
#include "support/oracles.hpp"

using namespace evotree;

namespace {

Dataset learnable_dataset() {
  // cls is x exactly when f0 <= 2.5: learnable with a single split.
  std::vector<AttributeSpec> attrs(3);
  attrs[0].name = "f0";
  attrs[1].name = "f1";
  attrs[2].name = "cls";
  attrs[2].kind = AttributeKind::Nominal;
  attrs[2].categories = {"x", "y"};
  std::vector<Row> rows;
  for (int i = 0; i < 24; ++i) {
    const double f0 = 0.25 * i;
    rows.push_back({Cell::numeric(f0), Cell::numeric(10.0 - f0),
                    Cell::nominal(f0 <= 2.5 ? 0 : 1)});
  }
  return Dataset(Schema(attrs, 2), rows);
}

bool history_bitwise_equal(const std::vector<GenerationStats>& a,
                           const std::vector<GenerationStats>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto bits = [](double v) { return std::bit_cast<std::uint64_t>(v); };
    if (a[i].generation != b[i].generation) return false;
    if (bits(a[i].best_fitness) != bits(b[i].best_fitness)) return false;
    if (bits(a[i].avg_fitness) != bits(b[i].avg_fitness)) return false;
    if (a[i].best_size != b[i].best_size) return false;
    if (bits(a[i].train_accuracy) != bits(b[i].train_accuracy)) return false;
    if (a[i].test_accuracy.has_value() != b[i].test_accuracy.has_value()) return false;
    if (a[i].test_accuracy && bits(*a[i].test_accuracy) != bits(*b[i].test_accuracy))
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("configuration validation") {
  EvolutionConfig ok;
  CHECK_NOTHROW(ok.validate());

  EvolutionConfig c = ok;
  c.population_size = 1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.crossover_prob = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.mutation_prob = -0.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.replacement_fraction = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.replacement_fraction = 1.1;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.size_bias_x = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.elitism = c.population_size;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ok;
  c.max_tree_size = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("serial and parallel population evaluation agree bitwise") {
  const Dataset d = learnable_dataset();
  const ValuePool pool = ValuePool::from_dataset(d);
  SplitMix64 rng(12);
  std::vector<DecisionTree> population;
  for (int i = 0; i < 64; ++i)
    population.push_back(testsupport::random_tree_sized(d.schema(), pool, 1 + 2 * (i % 9), rng));

  std::vector<double> acc_s(64), fit_s(64), acc_p(64), fit_p(64);
  evaluate_population_serial(population, d, 1000.0, acc_s, fit_s);
  evaluate_population_parallel(population, d, 1000.0, acc_p, fit_p, 4);
  for (int i = 0; i < 64; ++i) {
    CHECK(std::bit_cast<std::uint64_t>(acc_s[i]) == std::bit_cast<std::uint64_t>(acc_p[i]));
    CHECK(std::bit_cast<std::uint64_t>(fit_s[i]) == std::bit_cast<std::uint64_t>(fit_p[i]));
    CHECK(fit_s[i] == fitness_value(acc_s[i], population[i].size(), 1000.0));
  }
}

TEST_CASE("evolution is deterministic for a fixed seed, for any thread count") {
  const Dataset d = learnable_dataset();
  EvolutionConfig config;
  config.population_size = 20;
  config.generations = 8;
  config.seed = 321;

  const EvolveResult r1 = evolve(config, d, nullptr, nullptr, 1);
  const EvolveResult r2 = evolve(config, d, nullptr, nullptr, 1);
  const EvolveResult r4 = evolve(config, d, nullptr, nullptr, 4);
  CHECK(history_bitwise_equal(r1.history, r2.history));
  CHECK(history_bitwise_equal(r1.history, r4.history));
  CHECK(r1.best == r2.best);
  CHECK(r1.best == r4.best);

  EvolutionConfig other = config;
  other.seed = 322;
  const EvolveResult r3 = evolve(other, d, nullptr, nullptr, 1);
  CHECK_FALSE(history_bitwise_equal(r1.history, r3.history));
}

TEST_CASE("history spans generation 0 through G, with sane stats") {
  const Dataset d = learnable_dataset();
  EvolutionConfig config;
  config.population_size = 16;
  config.generations = 12;
  config.seed = 9;

  std::size_t sink_calls = 0;
  const EvolveResult r =
      evolve(config, d, nullptr, [&](const GenerationStats&) { ++sink_calls; }, 1);
  REQUIRE(r.history.size() == 13);
  CHECK(sink_calls == 13);
  for (std::size_t g = 0; g < r.history.size(); ++g) {
    const GenerationStats& s = r.history[g];
    CHECK(s.generation == g);
    CHECK(s.avg_fitness <= s.best_fitness);
    CHECK(s.best_fitness >= 0.0);
    CHECK(s.train_accuracy >= 0.0);
    CHECK(s.train_accuracy <= 1.0);
    CHECK(s.best_size % 2 == 1);
    CHECK_FALSE(s.test_accuracy.has_value());
    if (g > 0) CHECK(s.best_fitness >= r.history[g - 1].best_fitness);
  }
}

TEST_CASE("the engine learns a single-split problem") {
  const Dataset d = learnable_dataset();
  EvolutionConfig config;
  config.population_size = 30;
  config.generations = 30;
  config.seed = 4;
  const EvolveResult r = evolve(config, d, nullptr, nullptr, 0);
  CHECK(r.history.back().train_accuracy == 1.0);
  CHECK(accuracy(r.best, d) == 1.0);
}

TEST_CASE("a held-out set adds the test accuracy column") {
  const Dataset d = learnable_dataset();
  GenConfig gen;
  gen.n = 30;
  const Dataset soil = generate_soil_dataset(gen, TextureBoundaryTable::usda());

  EvolutionConfig config;
  config.population_size = 10;
  config.generations = 3;
  const EvolveResult r = evolve(config, d, &d, nullptr, 1);
  for (const GenerationStats& s : r.history) {
    REQUIRE(s.test_accuracy.has_value());
    CHECK(*s.test_accuracy >= 0.0);
    CHECK(*s.test_accuracy <= 1.0);
  }

  CHECK_THROWS_AS(evolve(config, d, &soil, nullptr, 1), SchemaMismatchError);
}

TEST_CASE("empty training data is rejected") {
  const Dataset d = learnable_dataset();
  const Dataset empty(d.schema(), {});
  EvolutionConfig config;
  CHECK_THROWS_AS(evolve(config, empty), DataError);
}

TEST_CASE("the size cap bounds every reported best tree") {
  const Dataset d = learnable_dataset();
  EvolutionConfig config;
  config.population_size = 20;
  config.generations = 15;
  config.max_tree_size = 5;
  config.seed = 77;
  const EvolveResult r = evolve(config, d, nullptr, nullptr, 1);
  for (const GenerationStats& s : r.history) CHECK(s.best_size <= 5);
  CHECK(r.best.size() <= 5);
}
