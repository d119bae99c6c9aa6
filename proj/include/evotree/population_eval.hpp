#pragma once

#include <span>

#include "evotree/dataset.hpp"
#include "evotree/tree.hpp"

namespace evotree {

// Training accuracy of one tree: fraction of rows whose leaf label equals the
// class value. Empty dataset counts as accuracy 0.
double accuracy(const DecisionTree& tree, const Dataset& data);

// Fitness law: accuracy^2 * x / (size^2 + x), where x trades accuracy
// against tree size. Strictly increasing in accuracy, strictly decreasing in
// size, and exactly 0 at accuracy 0.
double fitness_value(double accuracy, std::size_t size, double size_bias_x);

double fitness(const DecisionTree& tree, const Dataset& data, double size_bias_x);

// Whole-population evaluation. Each element of acc_out/fit_out depends only
// on the matching tree, so the parallel kernel partitions the index range and
// produces bit-identical output to the serial one; the serial version is the
// reference the parallel one is checked against.
void evaluate_population_serial(std::span<const DecisionTree> population, const Dataset& data,
                                double size_bias_x, std::span<double> acc_out,
                                std::span<double> fit_out);

// threads <= 0 means the runtime default.
void evaluate_population_parallel(std::span<const DecisionTree> population, const Dataset& data,
                                  double size_bias_x, std::span<double> acc_out,
                                  std::span<double> fit_out, int threads = 0);

// Parallel when built with OpenMP, serial otherwise. threads == 1 forces the
// serial path.
void evaluate_population(std::span<const DecisionTree> population, const Dataset& data,
                         double size_bias_x, std::span<double> acc_out,
                         std::span<double> fit_out, int threads = 0);

}  // namespace evotree
