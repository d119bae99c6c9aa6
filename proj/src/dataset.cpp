#include "evotree/dataset.hpp"

#include <bit>
#include <cmath>
#include <unordered_set>

#include "evotree/errors.hpp"
#include "evotree/util.hpp"

namespace evotree {

bool Cell::operator==(const Cell& o) const {
  if (kind != o.kind) return false;
  switch (kind) {
    case Kind::Numeric:
      return std::bit_cast<std::uint64_t>(num) == std::bit_cast<std::uint64_t>(o.num);
    case Kind::Nominal:
      return cat == o.cat;
    case Kind::Missing:
      return true;
  }
  return false;
}

namespace {

bool clean_token(const std::string& s) {
  if (s.empty()) return false;
  for (unsigned char c : s) {
    if (c < 0x20 || c == 0x7F || c == '\'') return false;
  }
  return true;
}

void validate_attributes(const std::vector<AttributeSpec>& attrs, std::size_t class_index) {
  if (attrs.size() < 2) throw ParseError("schema needs at least two attributes");
  if (class_index >= attrs.size()) throw ParseError("class attribute index out of range");
  std::unordered_set<std::string> names;
  for (const auto& a : attrs) {
    if (!clean_token(a.name))
      throw ParseError("attribute name '" + a.name + "' is empty or contains unsupported characters");
    if (!names.insert(a.name).second)
      throw ParseError("duplicate attribute name '" + a.name + "'");
    if (a.kind == AttributeKind::Nominal) {
      if (a.categories.empty())
        throw ParseError("nominal attribute '" + a.name + "' declares no categories");
      std::unordered_set<std::string> cats;
      for (const auto& c : a.categories) {
        if (!clean_token(c))
          throw ParseError("category '" + c + "' of attribute '" + a.name +
                           "' is empty or contains unsupported characters");
        if (!cats.insert(c).second)
          throw ParseError("duplicate category '" + c + "' in attribute '" + a.name + "'");
      }
    } else if (!a.categories.empty()) {
      throw ParseError("numeric attribute '" + a.name + "' must not declare categories");
    }
  }
  if (attrs[class_index].kind != AttributeKind::Nominal)
    throw ParseError("class attribute '" + attrs[class_index].name + "' must be nominal");
}

std::uint64_t schema_fingerprint(const std::vector<AttributeSpec>& attrs, std::size_t class_index) {
  std::string canon;
  canon += "class=" + std::to_string(class_index) + ";";
  for (const auto& a : attrs) {
    canon += a.name;
    canon += (a.kind == AttributeKind::Numeric) ? ":numeric" : ":nominal";
    for (const auto& c : a.categories) {
      canon += "|";
      canon += c;
    }
    canon += ";";
  }
  return fnv1a64(canon);
}

}  // namespace

Schema::Schema(std::vector<AttributeSpec> attributes, std::size_t class_index)
    : attributes_(std::move(attributes)), class_index_(class_index) {
  validate_attributes(attributes_, class_index_);
  fingerprint_ = schema_fingerprint(attributes_, class_index_);
}

std::vector<std::size_t> Schema::predictor_indices() const {
  std::vector<std::size_t> out;
  out.reserve(attributes_.size() - 1);
  for (std::size_t i = 0; i < attributes_.size(); ++i) {
    if (i != class_index_) out.push_back(i);
  }
  return out;
}

Dataset::Dataset(Schema schema, std::vector<Row> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {
  const auto& attrs = schema_.attributes();
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    const Row& row = rows_[r];
    if (row.size() != attrs.size())
      throw ParseError("row " + std::to_string(r + 1) + " has " + std::to_string(row.size()) +
                       " values, expected " + std::to_string(attrs.size()));
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Cell& cell = row[i];
      const AttributeSpec& a = attrs[i];
      switch (cell.kind) {
        case Cell::Kind::Missing:
          break;
        case Cell::Kind::Numeric:
          if (a.kind != AttributeKind::Numeric)
            throw ParseError("numeric value in nominal column '" + a.name + "', row " +
                             std::to_string(r + 1));
          if (!std::isfinite(cell.num))
            throw ParseError("non-finite value in column '" + a.name + "', row " +
                             std::to_string(r + 1));
          break;
        case Cell::Kind::Nominal:
          if (a.kind != AttributeKind::Nominal)
            throw ParseError("nominal value in numeric column '" + a.name + "', row " +
                             std::to_string(r + 1));
          if (cell.cat < 0 || static_cast<std::size_t>(cell.cat) >= a.categories.size())
            throw ParseError("category index out of range in column '" + a.name + "', row " +
                             std::to_string(r + 1));
          break;
      }
    }
    if (row[schema_.class_index()].is_missing())
      throw ParseError("missing class value in row " + std::to_string(r + 1));
  }
}

Dataset Dataset::from_table(const Table& table, std::optional<std::size_t> class_index) {
  if (table.attributes.empty()) throw ParseError("table declares no attributes");
  const std::size_t ci = class_index.value_or(table.attributes.size() - 1);
  Dataset d(Schema(table.attributes, ci), table.rows);
  if (!table.relation.empty()) d.relation = table.relation;
  return d;
}

}  // namespace evotree
