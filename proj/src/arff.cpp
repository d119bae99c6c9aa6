#include "evotree/arff.hpp"

#include <cctype>
#include <unordered_map>
#include <unordered_set>

#include "evotree/errors.hpp"
#include "evotree/util.hpp"

namespace evotree {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

bool is_ws(char c) { return c == ' ' || c == '\t'; }

// Cursor over one physical line, tracking 1-based columns for diagnostics.
struct Scanner {
  std::string_view line;
  std::size_t lineno;
  std::size_t pos = 0;

  std::size_t col() const { return pos + 1; }
  void skip_ws() {
    while (pos < line.size() && is_ws(line[pos])) ++pos;
  }
  bool at_end() {
    skip_ws();
    return pos >= line.size();
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, lineno, col()); }

  // Bare token up to whitespace or a stop character, or a single-quoted token
  // (no escapes; quotes cannot appear inside names).
  std::string read_token(std::string_view stops = "") {
    skip_ws();
    if (pos >= line.size()) fail("unexpected end of line");
    if (line[pos] == '\'') {
      const std::size_t open = col();
      ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && line[pos] != '\'') ++pos;
      if (pos >= line.size()) throw ParseError("unterminated quoted name", lineno, open);
      std::string out(line.substr(start, pos - start));
      ++pos;
      if (out.empty()) throw ParseError("empty quoted name", lineno, open);
      return out;
    }
    const std::size_t start = pos;
    while (pos < line.size() && !is_ws(line[pos]) &&
           stops.find(line[pos]) == std::string_view::npos)
      ++pos;
    if (pos == start) fail("expected a name");
    return std::string(line.substr(start, pos - start));
  }
};

struct Field {
  std::string text;
  bool quoted = false;
  std::size_t col = 0;
};

std::vector<Field> split_row(std::string_view line, std::size_t lineno) {
  std::vector<Field> out;
  std::size_t pos = 0;
  for (;;) {
    while (pos < line.size() && is_ws(line[pos])) ++pos;
    Field f;
    f.col = pos + 1;
    if (pos < line.size() && line[pos] == '\'') {
      ++pos;
      const std::size_t start = pos;
      while (pos < line.size() && line[pos] != '\'') ++pos;
      if (pos >= line.size()) throw ParseError("unterminated quoted value", lineno, f.col);
      f.text.assign(line.substr(start, pos - start));
      f.quoted = true;
      ++pos;
      while (pos < line.size() && is_ws(line[pos])) ++pos;
      if (pos < line.size() && line[pos] != ',')
        throw ParseError("unexpected text after quoted value", lineno, pos + 1);
    } else {
      const std::size_t start = pos;
      while (pos < line.size() && line[pos] != ',') ++pos;
      std::size_t end = pos;
      while (end > start && is_ws(line[end - 1])) --end;
      f.text.assign(line.substr(start, end - start));
      if (f.text.empty()) throw ParseError("empty value", lineno, f.col);
    }
    out.push_back(std::move(f));
    if (pos >= line.size()) break;
    ++pos;  // comma
  }
  return out;
}

}  // namespace

Table parse_arff_table(std::string_view text) {
  Table table;
  bool seen_relation = false;
  bool seen_data = false;
  std::unordered_set<std::string> attr_names;
  // Category spelling -> index, one map per nominal attribute.
  std::vector<std::unordered_map<std::string, std::int32_t>> lookup;

  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    std::string_view line = (nl == std::string_view::npos)
                                ? text.substr(start)
                                : text.substr(start, nl - start);
    start = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty() && line.front() == '%') continue;

    Scanner s{line, lineno};
    if (s.at_end()) continue;

    if (s.line[s.pos] == '@') {
      const std::size_t kw_col = s.col();
      if (seen_data) throw ParseError("directive after @data", lineno, kw_col);
      const std::string keyword = s.read_token();
      if (iequals(keyword, "@relation")) {
        if (seen_relation) throw ParseError("duplicate @relation", lineno, kw_col);
        if (!table.attributes.empty())
          throw ParseError("@relation must precede attribute declarations", lineno, kw_col);
        table.relation = s.read_token();
        if (!s.at_end()) s.fail("unexpected text after relation name");
        seen_relation = true;
      } else if (iequals(keyword, "@attribute")) {
        if (!seen_relation) throw ParseError("@attribute before @relation", lineno, kw_col);
        AttributeSpec attr;
        attr.name = s.read_token();
        if (!attr_names.insert(attr.name).second)
          throw ParseError("duplicate attribute name '" + attr.name + "'", lineno, kw_col);
        s.skip_ws();
        if (s.pos >= s.line.size()) s.fail("missing attribute type");
        if (s.line[s.pos] == '{') {
          attr.kind = AttributeKind::Nominal;
          ++s.pos;
          std::unordered_map<std::string, std::int32_t> cats;
          for (;;) {
            s.skip_ws();
            if (s.pos < s.line.size() && s.line[s.pos] == '}' && attr.categories.empty())
              s.fail("empty category list");
            const std::size_t vcol = s.col();
            std::string value = s.read_token(",}");
            if (!cats.emplace(value, static_cast<std::int32_t>(attr.categories.size())).second)
              throw ParseError("duplicate category '" + value + "'", lineno, vcol);
            attr.categories.push_back(std::move(value));
            s.skip_ws();
            if (s.pos >= s.line.size()) s.fail("unterminated category list");
            if (s.line[s.pos] == '}') {
              ++s.pos;
              break;
            }
            if (s.line[s.pos] != ',') s.fail("expected ',' or '}' in category list");
            ++s.pos;
          }
          if (!s.at_end()) s.fail("unexpected text after category list");
          lookup.push_back(std::move(cats));
        } else {
          const std::size_t tcol = s.col();
          const std::string type = s.read_token();
          if (iequals(type, "numeric") || iequals(type, "real")) {
            attr.kind = AttributeKind::Numeric;
          } else if (iequals(type, "string") || iequals(type, "date") ||
                     iequals(type, "integer") || iequals(type, "relational")) {
            throw ParseError("unsupported attribute type '" + type + "'", lineno, tcol);
          } else {
            throw ParseError("unknown attribute type '" + type + "'", lineno, tcol);
          }
          if (!s.at_end()) s.fail("unexpected text after attribute type");
          lookup.emplace_back();
        }
        table.attributes.push_back(std::move(attr));
      } else if (iequals(keyword, "@data")) {
        if (!seen_relation) throw ParseError("@data before @relation", lineno, kw_col);
        if (table.attributes.empty())
          throw ParseError("no attributes declared before @data", lineno, kw_col);
        if (!s.at_end()) s.fail("unexpected text after @data");
        seen_data = true;
      } else {
        throw ParseError("unknown directive '" + keyword + "'", lineno, kw_col);
      }
      continue;
    }

    if (!seen_data) {
      s.skip_ws();
      s.fail("expected a directive");
    }

    const std::vector<Field> fields = split_row(line, lineno);
    if (fields.size() != table.attributes.size())
      throw ParseError("row has " + std::to_string(fields.size()) + " values, expected " +
                           std::to_string(table.attributes.size()),
                       lineno, 1);
    Row row;
    row.reserve(fields.size());
    for (std::size_t i = 0; i < fields.size(); ++i) {
      const Field& f = fields[i];
      const AttributeSpec& attr = table.attributes[i];
      if (!f.quoted && f.text == "?") {
        row.push_back(Cell::missing());
        continue;
      }
      if (attr.kind == AttributeKind::Numeric) {
        if (f.quoted)
          throw ParseError("quoted value in numeric column '" + attr.name + "'", lineno, f.col);
        const auto v = try_parse_double(f.text);
        if (!v)
          throw ParseError("'" + f.text + "' is not a number (column '" + attr.name + "')",
                           lineno, f.col);
        row.push_back(Cell::numeric(*v));
      } else {
        const auto& cats = lookup[i];
        const auto it = cats.find(f.text);
        if (it == cats.end())
          throw ParseError("value '" + f.text + "' not declared for attribute '" + attr.name + "'",
                           lineno, f.col);
        row.push_back(Cell::nominal(it->second));
      }
    }
    table.rows.push_back(std::move(row));
  }

  if (!seen_data) throw ParseError("missing @data section");
  return table;
}

Dataset parse_arff(std::string_view text, std::optional<std::size_t> class_index) {
  return Dataset::from_table(parse_arff_table(text), class_index);
}

namespace {

bool bare_ok(std::string_view t) {
  if (t.empty() || t == "?") return false;
  for (char c : t) {
    const bool ok = (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') ||
                    c == '_' || c == '.' || c == '+' || c == '-';
    if (!ok) return false;
  }
  return true;
}

std::string quote_if_needed(const std::string& t) {
  if (bare_ok(t)) return t;
  if (t.find('\'') != std::string::npos || t.find('\n') != std::string::npos)
    throw std::invalid_argument("name cannot be serialized: " + t);
  return "'" + t + "'";
}

}  // namespace

std::string write_arff(const Dataset& d) {
  std::string out;
  out += "@relation " + quote_if_needed(d.relation.empty() ? "data" : d.relation) + "\n";
  for (const auto& attr : d.attributes()) {
    out += "@attribute " + quote_if_needed(attr.name) + " ";
    if (attr.kind == AttributeKind::Numeric) {
      out += "numeric";
    } else {
      out += "{";
      for (std::size_t i = 0; i < attr.categories.size(); ++i) {
        if (i != 0) out += ",";
        out += quote_if_needed(attr.categories[i]);
      }
      out += "}";
    }
    out += "\n";
  }
  out += "@data\n";
  for (const Row& row : d.rows()) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i != 0) out += ",";
      const Cell& cell = row[i];
      switch (cell.kind) {
        case Cell::Kind::Missing:
          out += "?";
          break;
        case Cell::Kind::Numeric:
          out += format_double(cell.num);
          break;
        case Cell::Kind::Nominal:
          out += quote_if_needed(
              d.attributes()[i].categories[static_cast<std::size_t>(cell.cat)]);
          break;
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace evotree
