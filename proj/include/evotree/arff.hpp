#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "evotree/dataset.hpp"

namespace evotree {

// Attribute-relation text format, restricted to the subset this tool uses:
//
//   % comment (only when '%' is the first character of the line)
//   @relation <name>
//   @attribute <name> numeric        (or: real)
//   @attribute <name> {v1,v2,...}
//   @data
//   1.5,red,?                        (one row per line, '?' = missing)
//
// Keywords are case-insensitive. Names and values containing spaces are
// single-quoted. Sparse rows, weights, and string/date attributes are not
// accepted. Errors carry 1-based line and column positions.

// Grammar-level parse: no class attribute is designated and no class checks
// run. Used directly for label-free prediction input.
Table parse_arff_table(std::string_view text);

// Full parse: designates the class attribute (default: the last one) and
// validates rows against the schema.
Dataset parse_arff(std::string_view text,
                   std::optional<std::size_t> class_index = std::nullopt);

// Inverse of parse_arff: emits a file that parses back to an identical
// dataset. Quoting is minimal and numbers use shortest round-trip form, so
// the output is byte-stable.
std::string write_arff(const Dataset& dataset);

}  // namespace evotree
