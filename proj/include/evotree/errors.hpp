#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace evotree {

// Input text could not be parsed. line/column are 1-based; 0 means "not tied
// to a source position" (e.g. a structural check after reading the whole file).
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line = 0, std::size_t column = 0)
      : std::runtime_error(format(message, line, column)), line_(line), column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  static std::string format(const std::string& message, std::size_t line, std::size_t column) {
    if (line == 0) return message;
    std::string out = "line " + std::to_string(line);
    if (column != 0) out += ", column " + std::to_string(column);
    out += ": " + message;
    return out;
  }

  std::size_t line_;
  std::size_t column_;
};

// Well-formed input whose content cannot be used (missing value reaching a
// tree test, empty value pool, unusable generator parameters at run time).
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& message) : std::runtime_error(message) {}
};

// Invalid hyperparameter or command-line configuration.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& message) : std::runtime_error(message) {}
};

// A model and a dataset disagree about the attribute layout.
class SchemaMismatchError : public std::runtime_error {
 public:
  explicit SchemaMismatchError(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace evotree
