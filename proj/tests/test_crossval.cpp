#include <doctest.h>

#include <cmath>

#include "evotree/crossval.hpp"
#include "evotree/errors.hpp"
#include "evotree/population_eval.hpp"
#include "evotree/rng.hpp"
#include "evotree/soilgen.hpp"
#include "support/oracles.hpp"

using namespace evotree;

TEST_CASE("fold assignments partition rows evenly") {
  SplitMix64 rng(606);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t k = 2 + rng.next_below(9);
    const std::size_t n = k + rng.next_below(200);
    const std::uint64_t seed = rng.next_u64();

    const FoldAssignment folds = kfold_assignment(n, k, seed);
    REQUIRE(folds.fold_of_row.size() == n);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t f : folds.fold_of_row) {
      REQUIRE(f < k);
      ++sizes[f];
    }
    std::size_t lo = n, hi = 0;
    for (std::size_t s : sizes) {
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    CHECK(hi - lo <= 1);

    // Same inputs, same assignment.
    const FoldAssignment again = kfold_assignment(n, k, seed);
    CHECK(again.fold_of_row == folds.fold_of_row);
  }
}

TEST_CASE("fold assignment depends on the seed") {
  const FoldAssignment a = kfold_assignment(100, 5, 1);
  const FoldAssignment b = kfold_assignment(100, 5, 2);
  CHECK(a.fold_of_row != b.fold_of_row);
}

TEST_CASE("invalid fold counts are rejected") {
  CHECK_THROWS_AS(kfold_assignment(10, 1, 0), ConfigError);
  CHECK_THROWS_AS(kfold_assignment(10, 11, 0), ConfigError);
  CHECK_NOTHROW(kfold_assignment(10, 10, 0));
}

TEST_CASE("fold splitting keeps rows intact and ordered") {
  GenConfig gen;
  gen.n = 23;
  gen.seed = 3;
  const Dataset d = generate_soil_dataset(gen, TextureBoundaryTable::usda());
  const FoldAssignment folds = kfold_split(d, 4, 11);

  for (std::size_t f = 0; f < 4; ++f) {
    const auto [train, test] = split_fold(d, folds, f);
    CHECK(train.n_rows() + test.n_rows() == d.n_rows());

    std::size_t ti = 0, hi = 0;
    for (std::size_t r = 0; r < d.n_rows(); ++r) {
      if (folds.fold_of_row[r] == f) {
        REQUIRE(hi < test.n_rows());
        CHECK(test.rows()[hi++] == d.rows()[r]);
      } else {
        REQUIRE(ti < train.n_rows());
        CHECK(train.rows()[ti++] == d.rows()[r]);
      }
    }
  }
  CHECK_THROWS_AS(split_fold(d, folds, 4), ConfigError);
}

TEST_CASE("cross-validation mean matches its folds") {
  GenConfig gen;
  gen.n = 30;
  gen.seed = 8;
  const Dataset d = generate_soil_dataset(gen, TextureBoundaryTable::usda());

  EvolutionConfig config;
  config.population_size = 10;
  config.generations = 4;
  config.seed = 17;

  const CvReport report = cross_validate(config, d, 3, 1);
  REQUIRE(report.fold_accuracy.size() == 3);
  REQUIRE(report.fold_best_size.size() == 3);

  double sum = 0.0;
  for (std::size_t f = report.fold_accuracy.size(); f-- > 0;) sum += report.fold_accuracy[f];
  CHECK(std::abs(report.mean_accuracy - sum / 3.0) <= 1e-12);
  for (double a : report.fold_accuracy) {
    CHECK(a >= 0.0);
    CHECK(a <= 1.0);
  }

  // Deterministic end to end.
  const CvReport again = cross_validate(config, d, 3, 0);
  CHECK(again.fold_accuracy == report.fold_accuracy);
  CHECK(again.mean_accuracy == report.mean_accuracy);
}

TEST_CASE("confusion matrix counts match accuracy") {
  std::vector<AttributeSpec> attrs(2);
  attrs[0].name = "f0";
  attrs[1].name = "cls";
  attrs[1].kind = AttributeKind::Nominal;
  attrs[1].categories = {"x", "y", "z"};
  const Schema schema(attrs, 1);
  std::vector<Row> rows = {
      {Cell::numeric(1), Cell::nominal(0)}, {Cell::numeric(2), Cell::nominal(0)},
      {Cell::numeric(3), Cell::nominal(1)}, {Cell::numeric(4), Cell::nominal(2)},
      {Cell::numeric(5), Cell::nominal(2)},
  };
  const Dataset d(schema, rows);
  // f0 <= 2.5 -> x, else y. Predicts rows as x,x,y,y,y.
  const DecisionTree t(
      make_internal(NodeTest::threshold_le(0, 2.5), make_leaf(0), make_leaf(1)), schema);

  const ConfusionMatrix m = confusion_matrix(t, d);
  REQUIRE(m.counts.size() == 3);
  CHECK(m.counts[0][0] == 2);  // x rows predicted x
  CHECK(m.counts[1][1] == 1);  // y row predicted y
  CHECK(m.counts[2][1] == 2);  // z rows predicted y
  CHECK(m.counts[2][2] == 0);
  CHECK(m.total() == 5);
  CHECK(m.diagonal() == 3);
  CHECK(static_cast<double>(m.diagonal()) / static_cast<double>(m.total()) ==
        doctest::Approx(accuracy(t, d)));
}
