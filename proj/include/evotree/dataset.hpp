#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace evotree {

enum class AttributeKind { Numeric, Nominal };

struct AttributeSpec {
  std::string name;
  AttributeKind kind = AttributeKind::Numeric;
  std::vector<std::string> categories;  // Nominal only; order defines category indices

  bool operator==(const AttributeSpec&) const = default;
};

// One value in a row. Nominal values are stored as indices into the
// attribute's category list.
struct Cell {
  enum class Kind : std::uint8_t { Numeric, Nominal, Missing };

  static Cell numeric(double v) { return Cell{Kind::Numeric, v, -1}; }
  static Cell nominal(std::int32_t c) { return Cell{Kind::Nominal, 0.0, c}; }
  static Cell missing() { return Cell{Kind::Missing, 0.0, -1}; }

  bool is_missing() const { return kind == Kind::Missing; }

  bool operator==(const Cell& o) const;  // numeric payloads compared bitwise

  Kind kind = Kind::Missing;
  double num = 0.0;
  std::int32_t cat = -1;
};

using Row = std::vector<Cell>;

// Raw parsed content: attribute declarations plus typed rows, with no class
// designation and no class-specific checks. Prediction inputs without labels
// stay at this level.
struct Table {
  std::string relation;
  std::vector<AttributeSpec> attributes;
  std::vector<Row> rows;
};

// Attribute layout plus the designated class attribute. Construction
// validates: at least two attributes, unique nonempty names, nominal
// attributes have at least one category with unique nonempty spellings,
// the class attribute is nominal. Names and categories must not contain
// single quotes or control characters, which keeps text serialization total.
class Schema {
 public:
  Schema(std::vector<AttributeSpec> attributes, std::size_t class_index);

  const std::vector<AttributeSpec>& attributes() const { return attributes_; }
  std::size_t class_index() const { return class_index_; }
  const AttributeSpec& class_attribute() const { return attributes_[class_index_]; }
  std::size_t n_classes() const { return class_attribute().categories.size(); }

  std::vector<std::size_t> predictor_indices() const;

  // Stable digest of the attribute layout and class designation. Models carry
  // it so that a model is never applied to data with a different layout.
  std::uint64_t fingerprint() const { return fingerprint_; }

  bool operator==(const Schema& o) const {
    return class_index_ == o.class_index_ && attributes_ == o.attributes_;
  }

 private:
  std::vector<AttributeSpec> attributes_;
  std::size_t class_index_;
  std::uint64_t fingerprint_;
};

// Schema plus rows, validated together: every row has one cell per attribute,
// cell kinds match the attribute kinds (or are Missing), nominal indices are
// in range, numeric values are finite, and the class cell is never Missing.
class Dataset {
 public:
  Dataset(Schema schema, std::vector<Row> rows);

  // Designates a class attribute (default: last) and validates the rows.
  static Dataset from_table(const Table& table,
                            std::optional<std::size_t> class_index = std::nullopt);

  const Schema& schema() const { return schema_; }
  const std::vector<AttributeSpec>& attributes() const { return schema_.attributes(); }
  std::size_t class_index() const { return schema_.class_index(); }
  std::size_t n_classes() const { return schema_.n_classes(); }

  const std::vector<Row>& rows() const { return rows_; }
  std::size_t n_rows() const { return rows_.size(); }

  // Class category index of one row.
  std::int32_t class_of(std::size_t row) const { return rows_[row][schema_.class_index()].cat; }

  std::string relation = "data";

 private:
  Schema schema_;
  std::vector<Row> rows_;
};

}  // namespace evotree
