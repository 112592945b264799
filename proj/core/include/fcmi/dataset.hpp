#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fcmi {

/// Numeric, or categorical with the number of distinct observed categories.
struct ColumnKind {
  enum class Tag { Numeric, Categorical };

  Tag tag = Tag::Numeric;
  std::size_t cardinality = 0;

  static ColumnKind numeric() { return {Tag::Numeric, 0}; }
  static ColumnKind categorical(std::size_t cardinality) {
    return {Tag::Categorical, cardinality};
  }
  bool is_numeric() const { return tag == Tag::Numeric; }
  bool is_categorical() const { return tag == Tag::Categorical; }

  friend bool operator==(const ColumnKind&, const ColumnKind&) = default;
};

/// A single cell value, used where numeric and categorical cells meet
/// (ground truth, modes, CSV round trips).
using Cell = std::variant<double, std::string>;

std::string to_string(const Cell& cell);

using MissingMask = std::vector<std::uint8_t>;

/// One named column. Numeric columns store doubles, categorical columns store
/// the raw category strings. `missing[i] != 0` marks a masked cell; masked
/// cells hold NaN or "" and are never read by any consumer.
class Column {
 public:
  Column(std::string name, std::vector<double> values, MissingMask missing = {});
  Column(std::string name, std::vector<std::string> values, MissingMask missing = {});

  static Column numeric(std::string name, std::vector<std::optional<double>> cells);
  static Column categorical(std::string name, std::vector<std::optional<std::string>> cells);

  const std::string& name() const { return name_; }
  std::size_t size() const { return missing_.size(); }
  bool is_numeric() const { return std::holds_alternative<std::vector<double>>(values_); }
  bool is_categorical() const { return !is_numeric(); }

  /// Categorical cardinality is recomputed from the observed cells, so it
  /// always equals the number of distinct observed categories.
  ColumnKind kind() const;

  std::span<const double> numeric_values() const;
  std::span<const std::string> categorical_values() const;
  std::span<const std::uint8_t> missing() const { return missing_; }

  bool is_missing(std::size_t row) const { return missing_[row] != 0; }
  std::size_t missing_count() const;
  std::size_t observed_count() const { return size() - missing_count(); }

  /// Value of an observed cell; UsageError when the cell is masked.
  Cell cell(std::size_t row) const;

  void set(std::size_t row, double value);
  void set(std::size_t row, std::string value);
  void set(std::size_t row, const Cell& value);
  void mask(std::size_t row);

  Column select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const Column& a, const Column& b);

 private:
  std::string name_;
  std::variant<std::vector<double>, std::vector<std::string>> values_;
  MissingMask missing_;
};

/// Column-major table with a per-cell missing mask.
///
/// Treated as a value: the transformations in this library take a const
/// Dataset and return a new one. The `set`/`mask` members exist for
/// single-writer construction inside an imputer and must not be called on a
/// Dataset shared across threads.
class Dataset {
 public:
  Dataset() = default;
  explicit Dataset(std::vector<Column> columns);

  std::size_t n_rows() const { return n_rows_; }
  std::size_t n_cols() const { return columns_.size(); }
  bool empty() const { return columns_.empty(); }

  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(std::size_t index) const;
  const Column& column(std::string_view name) const;
  std::vector<std::string> names() const;

  std::optional<std::size_t> find(std::string_view name) const;
  /// Column position; UsageError when absent.
  std::size_t index_of(std::string_view name) const;

  std::size_t missing_count() const;
  bool complete() const { return missing_count() == 0; }

  /// Appends a column; throws SchemaError on a duplicate name or a length
  /// mismatch with existing columns.
  void add_column(Column column);
  void replace_column(std::size_t index, Column column);
  /// Replaces one column by several at the same position.
  void splice_column(std::size_t index, std::vector<Column> replacement);

  void set(std::size_t col, std::size_t row, const Cell& value);
  void set(std::size_t col, std::size_t row, double value);
  void mask(std::size_t col, std::size_t row);

  Dataset select_rows(std::span<const std::size_t> rows) const;

  friend bool operator==(const Dataset& a, const Dataset& b);

 private:
  std::vector<Column> columns_;
  std::unordered_map<std::string, std::size_t> index_;
  std::size_t n_rows_ = 0;
};

/// Summary statistics over observed cells only.
struct ColumnStats {
  std::optional<double> mean;    // numeric columns with >= 1 observed cell
  std::optional<double> stddev;  // population denominator n
  std::optional<Cell> mode;      // smallest value among the most frequent
  std::size_t missing = 0;
};

ColumnStats column_stats(const Dataset& d, std::string_view column);

}  // namespace fcmi
