#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evotree/dataset.hpp"

namespace evotree {

struct TextureClass {
  std::string symbol;
  std::string long_name;
};

// One linear inequality over (sand, silt, clay) percentages:
// sand_c*sand + silt_c*silt + clay_c*clay  <=  rhs   (or >= when at_most is
// false). Bounds are inclusive.
struct BoundaryTerm {
  double sand_c = 0.0;
  double silt_c = 0.0;
  double clay_c = 0.0;
  bool at_most = true;
  double rhs = 0.0;
};

// Conjunction of terms naming one class. Rules are ordered; the first rule
// whose terms all hold decides the class.
struct BoundaryRule {
  std::vector<BoundaryTerm> terms;
  std::size_t class_index;
};

// Ordered rule list over the composition simplex. The built-in table covers
// every valid composition; coverage is a tested property, and classify
// throws DataError if a composition ever falls through.
class TextureBoundaryTable {
 public:
  TextureBoundaryTable(std::string version, std::vector<TextureClass> classes,
                       std::vector<BoundaryRule> rules);

  // Standard 11-class texture triangle (silt merged into silty loam).
  static const TextureBoundaryTable& usda();

  const std::string& version() const { return version_; }
  const std::vector<TextureClass>& classes() const { return classes_; }
  const std::vector<BoundaryRule>& rules() const { return rules_; }

  // Percentages must be nonnegative and sum to 100 within 1e-6.
  std::size_t classify(double sand, double silt, double clay) const;

 private:
  std::string version_;
  std::vector<TextureClass> classes_;
  std::vector<BoundaryRule> rules_;
};

const TextureClass& classify_texture(double sand, double silt, double clay,
                                     const TextureBoundaryTable& table);

struct GenConfig {
  std::size_t n = 500;
  std::uint64_t seed = 0;
  double noise_rate = 0.0;   // probability a label is reassigned to a different class
  double depth_min = 0.0;    // metres
  double depth_max = 2.0;

  void validate() const;  // throws ConfigError
};

// Attribute layout of generated data: Depth, Sand, Silt, Clay, Sandbysilt,
// Sandbyclay, Sandbysiltclay (ratios with denominators floored at 0.5), and
// the nominal TextureClass, which is the class attribute.
Schema soil_schema(const TextureBoundaryTable& table);

// Compositions drawn uniformly from the simplex, depth uniform in
// [depth_min, depth_max), labels from the boundary table, then flipped to a
// uniformly chosen different class with probability noise_rate.
Dataset generate_soil_dataset(const GenConfig& config, const TextureBoundaryTable& table);

}  // namespace evotree
