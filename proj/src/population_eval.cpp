#include "evotree/population_eval.hpp"

#include <cassert>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "evotree/errors.hpp"

namespace evotree {

double accuracy(const DecisionTree& tree, const Dataset& data) {
  if (tree.schema_fingerprint() != data.schema().fingerprint())
    throw SchemaMismatchError("dataset does not match the tree's attribute layout");
  if (data.n_rows() == 0) return 0.0;
  std::size_t correct = 0;
  for (std::size_t r = 0; r < data.n_rows(); ++r) {
    if (classify(tree, data.rows()[r]) == data.class_of(r)) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.n_rows());
}

double fitness_value(double accuracy, std::size_t size, double size_bias_x) {
  if (accuracy == 0.0) return 0.0;
  const double s = static_cast<double>(size);
  return accuracy * accuracy * size_bias_x / (s * s + size_bias_x);
}

double fitness(const DecisionTree& tree, const Dataset& data, double size_bias_x) {
  return fitness_value(accuracy(tree, data), tree.size(), size_bias_x);
}

void evaluate_population_serial(std::span<const DecisionTree> population, const Dataset& data,
                                double size_bias_x, std::span<double> acc_out,
                                std::span<double> fit_out) {
  assert(acc_out.size() == population.size() && fit_out.size() == population.size());
  for (std::size_t i = 0; i < population.size(); ++i) {
    acc_out[i] = accuracy(population[i], data);
    fit_out[i] = fitness_value(acc_out[i], population[i].size(), size_bias_x);
  }
}

void evaluate_population_parallel(std::span<const DecisionTree> population, const Dataset& data,
                                  double size_bias_x, std::span<double> acc_out,
                                  std::span<double> fit_out, int threads) {
  assert(acc_out.size() == population.size() && fit_out.size() == population.size());
#ifdef _OPENMP
  const auto n = static_cast<std::int64_t>(population.size());
  std::exception_ptr error;
#pragma omp parallel for schedule(static) num_threads(threads > 0 ? threads : omp_get_max_threads())
  for (std::int64_t i = 0; i < n; ++i) {
    try {
      acc_out[i] = accuracy(population[i], data);
      fit_out[i] = fitness_value(acc_out[i], population[i].size(), size_bias_x);
    } catch (...) {
      // Exceptions must not escape the parallel region; surface one after.
#pragma omp critical
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
#else
  (void)threads;
  evaluate_population_serial(population, data, size_bias_x, acc_out, fit_out);
#endif
}

void evaluate_population(std::span<const DecisionTree> population, const Dataset& data,
                         double size_bias_x, std::span<double> acc_out,
                         std::span<double> fit_out, int threads) {
  if (threads == 1) {
    evaluate_population_serial(population, data, size_bias_x, acc_out, fit_out);
  } else {
    evaluate_population_parallel(population, data, size_bias_x, acc_out, fit_out, threads);
  }
}

}  // namespace evotree
