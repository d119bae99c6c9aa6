#include "evotree/crossval.hpp"

#include <numeric>

#include "evotree/errors.hpp"
#include "evotree/population_eval.hpp"
#include "evotree/rng.hpp"

namespace evotree {

FoldAssignment kfold_assignment(std::size_t n_rows, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw ConfigError("fold count must be at least 2");
  if (k > n_rows) throw ConfigError("fold count exceeds the number of rows");

  std::vector<std::size_t> perm(n_rows);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = n_rows - 1; i > 0; --i) {
    const std::size_t j = rng.next_below(i + 1);
    std::swap(perm[i], perm[j]);
  }

  FoldAssignment out;
  out.k = k;
  out.fold_of_row.resize(n_rows);
  for (std::size_t pos = 0; pos < n_rows; ++pos) out.fold_of_row[perm[pos]] = pos % k;
  return out;
}

FoldAssignment kfold_split(const Dataset& data, std::size_t k, std::uint64_t seed) {
  return kfold_assignment(data.n_rows(), k, seed);
}

std::pair<Dataset, Dataset> split_fold(const Dataset& data, const FoldAssignment& folds,
                                       std::size_t fold) {
  if (folds.fold_of_row.size() != data.n_rows())
    throw ConfigError("fold assignment does not cover the dataset");
  if (fold >= folds.k) throw ConfigError("fold index out of range");
  std::vector<Row> train_rows, test_rows;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    (folds.fold_of_row[r] == fold ? test_rows : train_rows).push_back(data.rows()[r]);
  }
  Dataset train(data.schema(), std::move(train_rows));
  Dataset test(data.schema(), std::move(test_rows));
  train.relation = data.relation;
  test.relation = data.relation;
  return {std::move(train), std::move(test)};
}

CvReport cross_validate(const EvolutionConfig& config, const Dataset& data, std::size_t k,
                        int threads) {
  config.validate();
  const FoldAssignment folds = kfold_split(data, k, config.seed);
  CvReport report;
  report.fold_accuracy.reserve(k);
  report.fold_best_size.reserve(k);
  for (std::size_t f = 0; f < k; ++f) {
    auto [train, test] = split_fold(data, folds, f);
    EvolutionConfig fold_config = config;
    fold_config.seed = config.seed ^ static_cast<std::uint64_t>(f);
    const EvolveResult result = evolve(fold_config, train, &test, nullptr, threads);
    report.fold_accuracy.push_back(accuracy(result.best, test));
    report.fold_best_size.push_back(result.best.size());
  }
  report.mean_accuracy =
      std::accumulate(report.fold_accuracy.begin(), report.fold_accuracy.end(), 0.0) /
      static_cast<double>(k);
  return report;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : counts) {
    for (std::uint64_t c : row) sum += c;
  }
  return sum;
}

std::uint64_t ConfusionMatrix::diagonal() const {
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) sum += counts[i][i];
  return sum;
}

ConfusionMatrix confusion_matrix(const DecisionTree& tree, const Dataset& data) {
  if (tree.schema_fingerprint() != data.schema().fingerprint())
    throw SchemaMismatchError("dataset does not match the tree's attribute layout");
  ConfusionMatrix m;
  m.counts.assign(data.n_classes(), std::vector<std::uint64_t>(data.n_classes(), 0));
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    const auto actual = static_cast<std::size_t>(data.class_of(r));
    const auto predicted = static_cast<std::size_t>(classify(tree, data.rows()[r]));
    ++m.counts[actual][predicted];
  }
  return m;
}

}  // namespace evotree
