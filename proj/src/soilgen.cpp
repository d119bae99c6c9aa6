#include "evotree/soilgen.hpp"

#include <algorithm>
#include <cmath>

#include "evotree/errors.hpp"
#include "evotree/rng.hpp"

namespace evotree {

TextureBoundaryTable::TextureBoundaryTable(std::string version, std::vector<TextureClass> classes,
                                           std::vector<BoundaryRule> rules)
    : version_(std::move(version)), classes_(std::move(classes)), rules_(std::move(rules)) {
  if (classes_.size() < 2) throw ConfigError("boundary table needs at least two classes");
  for (const BoundaryRule& r : rules_) {
    if (r.class_index >= classes_.size())
      throw ConfigError("boundary rule names an unknown class");
    if (r.terms.empty()) throw ConfigError("boundary rule has no terms");
  }
}

const TextureBoundaryTable& TextureBoundaryTable::usda() {
  static const TextureBoundaryTable table = [] {
    std::vector<TextureClass> classes = {
        {"s", "Sand"},           {"sicl", "Silty Clay Loam"}, {"sic", "Silty Clay"},
        {"c", "Clay"},           {"sl", "Sandy Loam"},        {"cl", "Clay Loam"},
        {"sil", "Silty Loam"},   {"l", "Loam"},               {"ls", "Loamy Sand"},
        {"scl", "Sandy Clay Loam"}, {"sc", "Sandy Clay"},
    };
    constexpr std::size_t s = 0, sicl = 1, sic = 2, c = 3, sl = 4, cl = 5, sil = 6, l = 7,
                          ls = 8, scl = 9, sc = 10;
    const auto sand_ge = [](double v) { return BoundaryTerm{1, 0, 0, false, v}; };
    const auto sand_le = [](double v) { return BoundaryTerm{1, 0, 0, true, v}; };
    const auto silt_ge = [](double v) { return BoundaryTerm{0, 1, 0, false, v}; };
    const auto silt_le = [](double v) { return BoundaryTerm{0, 1, 0, true, v}; };
    const auto clay_ge = [](double v) { return BoundaryTerm{0, 0, 1, false, v}; };
    const auto clay_le = [](double v) { return BoundaryTerm{0, 0, 1, true, v}; };
    std::vector<BoundaryRule> rules = {
        {{clay_ge(40), silt_ge(40)}, sic},
        {{clay_ge(35), sand_ge(45)}, sc},
        {{clay_ge(40)}, c},
        {{clay_ge(27), sand_le(20)}, sicl},
        {{clay_ge(27), sand_le(45)}, cl},
        {{clay_ge(20), sand_ge(45), silt_le(28)}, scl},
        {{BoundaryTerm{0, 1, 1.5, true, 15}}, s},
        {{BoundaryTerm{0, 1, 2, true, 30}}, ls},
        {{silt_ge(50)}, sil},
        {{silt_ge(28), sand_le(52), clay_ge(7)}, l},
        {{clay_le(27), silt_le(50)}, sl},
    };
    return TextureBoundaryTable("usda-11-v1", std::move(classes), std::move(rules));
  }();
  return table;
}

std::size_t TextureBoundaryTable::classify(double sand, double silt, double clay) const {
  if (!(sand >= 0.0) || !(silt >= 0.0) || !(clay >= 0.0))
    throw DataError("texture components must be nonnegative");
  if (std::abs(sand + silt + clay - 100.0) > 1e-6)
    throw DataError("texture components must sum to 100");
  for (const BoundaryRule& rule : rules_) {
    bool hold = true;
    for (const BoundaryTerm& t : rule.terms) {
      const double v = t.sand_c * sand + t.silt_c * silt + t.clay_c * clay;
      if (t.at_most ? (v > t.rhs) : (v < t.rhs)) {
        hold = false;
        break;
      }
    }
    if (hold) return rule.class_index;
  }
  throw DataError("texture rules do not cover this composition");
}

const TextureClass& classify_texture(double sand, double silt, double clay,
                                     const TextureBoundaryTable& table) {
  return table.classes()[table.classify(sand, silt, clay)];
}

void GenConfig::validate() const {
  if (n == 0) throw ConfigError("row count must be at least 1");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0))
    throw ConfigError("noise rate must be in [0, 1]");
  if (!std::isfinite(depth_min) || !std::isfinite(depth_max))
    throw ConfigError("depth bounds must be finite");
  if (!(depth_min >= 0.0)) throw ConfigError("depth minimum must be nonnegative");
  if (!(depth_max > depth_min)) throw ConfigError("depth range must be positive");
}

Schema soil_schema(const TextureBoundaryTable& table) {
  std::vector<AttributeSpec> attrs(8);
  attrs[0].name = "Depth";
  attrs[1].name = "Sand";
  attrs[2].name = "Silt";
  attrs[3].name = "Clay";
  attrs[4].name = "Sandbysilt";
  attrs[5].name = "Sandbyclay";
  attrs[6].name = "Sandbysiltclay";
  attrs[7].name = "TextureClass";
  attrs[7].kind = AttributeKind::Nominal;
  for (const TextureClass& c : table.classes()) attrs[7].categories.push_back(c.symbol);
  return Schema(std::move(attrs), 7);
}

Dataset generate_soil_dataset(const GenConfig& config, const TextureBoundaryTable& table) {
  config.validate();
  Schema schema = soil_schema(table);
  const std::size_t n_classes = table.classes().size();
  SplitMix64 rng(config.seed);

  std::vector<Row> rows;
  rows.reserve(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    const double depth = config.depth_min + rng.next_unit() * (config.depth_max - config.depth_min);
    const double u1 = rng.next_unit();
    const double u2 = rng.next_unit();
    const double lo = std::min(u1, u2);
    const double hi = std::max(u1, u2);
    const double sand = 100.0 * lo;
    const double silt = 100.0 * (hi - lo);
    const double clay = std::max(0.0, 100.0 - sand - silt);

    auto label = static_cast<std::int32_t>(table.classify(sand, silt, clay));
    // One decision draw per row; a re-label draw is consumed only on a flip.
    const bool flip = rng.next_unit() < config.noise_rate;
    if (flip) {
      label = static_cast<std::int32_t>(
          (static_cast<std::uint64_t>(label) + 1 + rng.next_below(n_classes - 1)) % n_classes);
    }

    const auto ratio = [](double num, double den) { return num / std::max(den, 0.5); };
    Row row(8);
    row[0] = Cell::numeric(depth);
    row[1] = Cell::numeric(sand);
    row[2] = Cell::numeric(silt);
    row[3] = Cell::numeric(clay);
    row[4] = Cell::numeric(ratio(sand, silt));
    row[5] = Cell::numeric(ratio(sand, clay));
    row[6] = Cell::numeric(ratio(sand, silt + clay));
    row[7] = Cell::nominal(label);
    rows.push_back(std::move(row));
  }

  Dataset out(std::move(schema), std::move(rows));
  out.relation = "soil_texture";
  return out;
}

}  // namespace evotree
