// Times the serial population-evaluation kernel against the parallel one on
// generated soil data and checks that their outputs are bit-identical.

#include <bit>
#include <chrono>
#include <cstdint>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "evotree/evolve.hpp"
#include "evotree/population_eval.hpp"
#include "evotree/rng.hpp"
#include "evotree/soilgen.hpp"
#include "evotree/tree.hpp"
#include "evotree/util.hpp"

using namespace evotree;

namespace {

double time_ms(const std::function<void()>& fn, int repeats) {
  fn();  // warm-up
  const auto start = std::chrono::steady_clock::now();
  for (int i = 0; i < repeats; ++i) fn();
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

}  // namespace

int main(int argc, char** argv) {
  std::size_t n_rows = 2000;
  std::size_t n_trees = 256;
  int repeats = 20;
  if (argc > 1 && (std::string(argv[1]) == "-h" || std::string(argv[1]) == "--help")) {
    std::cout << "usage: bench_eval [rows] [trees] [repeats]\n";
    return 0;
  }
  try {
    if (argc > 1) n_rows = std::stoul(argv[1]);
    if (argc > 2) n_trees = std::stoul(argv[2]);
    if (argc > 3) repeats = std::stoi(argv[3]);
  } catch (const std::exception&) {
    std::cerr << "usage: bench_eval [rows] [trees] [repeats]\n";
    return 2;
  }

  GenConfig gen;
  gen.n = n_rows;
  gen.seed = 7;
  const Dataset data = generate_soil_dataset(gen, TextureBoundaryTable::usda());
  const ValuePool pool = ValuePool::from_dataset(data);

  // Grow a population of varied sizes by a few rounds of crossover.
  SplitMix64 rng(11);
  std::vector<DecisionTree> population;
  for (std::size_t i = 0; i < n_trees; ++i)
    population.push_back(random_tree(data.schema(), pool, rng));
  for (int round = 0; round < 6; ++round) {
    for (std::size_t i = 0; i + 1 < population.size(); i += 2) {
      auto children = crossover_capped(population[i], population[i + 1], 1.0, 2000,
                                       data.schema(), rng);
      population[i] = children.first;
      population[i + 1] = children.second;
    }
  }

  std::vector<double> acc_s(n_trees), fit_s(n_trees), acc_p(n_trees), fit_p(n_trees);
  const double serial_ms = time_ms(
      [&] { evaluate_population_serial(population, data, 1000.0, acc_s, fit_s); }, repeats);
  const double parallel_ms = time_ms(
      [&] { evaluate_population_parallel(population, data, 1000.0, acc_p, fit_p); }, repeats);

  bool identical = true;
  for (std::size_t i = 0; i < n_trees; ++i) {
    identical = identical &&
                std::bit_cast<std::uint64_t>(acc_s[i]) == std::bit_cast<std::uint64_t>(acc_p[i]) &&
                std::bit_cast<std::uint64_t>(fit_s[i]) == std::bit_cast<std::uint64_t>(fit_p[i]);
  }

  std::cout << "rows=" << n_rows << " trees=" << n_trees << " repeats=" << repeats << "\n";
  std::cout << "serial_ms=" << format_double(serial_ms) << "\n";
  std::cout << "parallel_ms=" << format_double(parallel_ms) << "\n";
  std::cout << "speedup=" << format_double(serial_ms / parallel_ms) << "\n";
  std::cout << "outputs_identical=" << (identical ? "yes" : "no") << "\n";
  return identical ? 0 : 1;
}
