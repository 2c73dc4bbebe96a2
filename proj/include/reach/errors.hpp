#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace reach {

// Root of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid HashConfig, empty group-by list, empty universe.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Two sketches built under different HashConfig identities.
class IncompatibleSketchError : public Error {
 public:
  using Error::Error;
};

// Violated call contract (length mismatch, out-of-range argument).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized bytes. offset points at the first offending byte.
class FormatError : public Error {
 public:
  FormatError(std::size_t offset, const std::string& what)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  [[nodiscard]] std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

// Delimited-text ingestion failure. line is 1-based; 0 means "whole file".
class IngestError : public Error {
 public:
  IngestError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  [[nodiscard]] std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A clause referenced a dimension or column that does not exist.
class ResolutionError : public Error {
 public:
  enum class Kind { unknown_dimension, unknown_column };

  ResolutionError(Kind kind, std::string dimension, std::string column = {})
      : Error(kind == Kind::unknown_dimension ? "unknown dimension '" + dimension + "'"
                                              : "unknown column '" + column + "' in dimension '" + dimension + "'"),
        kind_(kind),
        dimension_(std::move(dimension)),
        column_(std::move(column)) {}

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& dimension() const noexcept { return dimension_; }
  [[nodiscard]] const std::string& column() const noexcept { return column_; }

 private:
  Kind kind_;
  std::string dimension_;
  std::string column_;
};

// Filters matched zero cells. Deliberately not reported as reach 0.
class EmptySelectionError : public Error {
 public:
  explicit EmptySelectionError(std::string dimension)
      : Error("no cell of dimension '" + dimension + "' matches the filters"), dimension_(std::move(dimension)) {}

  [[nodiscard]] const std::string& dimension() const noexcept { return dimension_; }

 private:
  std::string dimension_;
};

// Expression document does not match the schema. path is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& what) : Error(path + ": " + what), path_(std::move(path)) {}

  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace reach
