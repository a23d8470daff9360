#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace adausm {

// A vector argument contained a non-finite entry; remembers which coordinate.
class NonFiniteError : public std::invalid_argument {
 public:
  NonFiniteError(const std::string& what, std::size_t coordinate)
      : std::invalid_argument(what + " (coordinate " + std::to_string(coordinate) + ")"),
        coordinate_(coordinate) {}
  std::size_t coordinate() const { return coordinate_; }

 private:
  std::size_t coordinate_;
};

// CSV cell/structure problem with 1-based file coordinates (header = row 1).
class CsvError : public std::runtime_error {
 public:
  CsvError(const std::string& what, std::size_t row, std::size_t col)
      : std::runtime_error(what + " at (" + std::to_string(row) + "," +
                           std::to_string(col) + ")"),
        row_(row),
        col_(col) {}
  std::size_t row() const { return row_; }
  std::size_t col() const { return col_; }

 private:
  std::size_t row_, col_;
};

// Config file problem with a 1-based line number.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& what, std::size_t line)
      : std::invalid_argument("config line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

}  // namespace adausm
