#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "evotree/dataset.hpp"
#include "evotree/evolve.hpp"

namespace evotree {

// Row -> fold map. Folds are as equal as possible (sizes differ by at most
// one) and the assignment depends only on (row count, k, seed).
struct FoldAssignment {
  std::size_t k = 0;
  std::vector<std::size_t> fold_of_row;
};

FoldAssignment kfold_assignment(std::size_t n_rows, std::size_t k, std::uint64_t seed);
FoldAssignment kfold_split(const Dataset& data, std::size_t k, std::uint64_t seed);

// (train, held-out) pair for one fold, row order preserved.
std::pair<Dataset, Dataset> split_fold(const Dataset& data, const FoldAssignment& folds,
                                       std::size_t fold);

struct CvReport {
  std::vector<double> fold_accuracy;   // held-out accuracy per fold
  std::vector<std::size_t> fold_best_size;
  double mean_accuracy = 0.0;
};

// Runs one evolution per fold (seed: config.seed xor fold index) and scores
// each best tree on its held-out fold.
CvReport cross_validate(const EvolutionConfig& config, const Dataset& data, std::size_t k,
                        int threads = 0);

// counts[actual][predicted], both indexed by class category.
struct ConfusionMatrix {
  std::vector<std::vector<std::uint64_t>> counts;

  std::uint64_t total() const;
  std::uint64_t diagonal() const;
};

ConfusionMatrix confusion_matrix(const DecisionTree& tree, const Dataset& data);

}  // namespace evotree
