#include "fcmi/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "fcmi/error.hpp"

namespace fcmi {

namespace {

constexpr double kMaskedNumeric = std::numeric_limits<double>::quiet_NaN();

MissingMask default_mask(std::size_t n, const MissingMask& given) {
  if (given.empty()) return MissingMask(n, 0);
  if (given.size() != n) throw SchemaError("missing mask length does not match column length");
  return given;
}

}  // namespace

std::string to_string(const Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, std::get<double>(cell));
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Column

Column::Column(std::string name, std::vector<double> values, MissingMask missing)
    : name_(std::move(name)), missing_(default_mask(values.size(), missing)) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (missing_[i]) values[i] = kMaskedNumeric;
  values_ = std::move(values);
}

Column::Column(std::string name, std::vector<std::string> values, MissingMask missing)
    : name_(std::move(name)), missing_(default_mask(values.size(), missing)) {
  for (std::size_t i = 0; i < values.size(); ++i)
    if (missing_[i]) values[i].clear();
  values_ = std::move(values);
}

Column Column::numeric(std::string name, std::vector<std::optional<double>> cells) {
  std::vector<double> values(cells.size(), kMaskedNumeric);
  MissingMask mask(cells.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) values[i] = *cells[i];
    else mask[i] = 1;
  }
  return Column(std::move(name), std::move(values), std::move(mask));
}

Column Column::categorical(std::string name, std::vector<std::optional<std::string>> cells) {
  std::vector<std::string> values(cells.size());
  MissingMask mask(cells.size(), 0);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i]) values[i] = *cells[i];
    else mask[i] = 1;
  }
  return Column(std::move(name), std::move(values), std::move(mask));
}

ColumnKind Column::kind() const {
  if (is_numeric()) return ColumnKind::numeric();
  const auto& values = std::get<std::vector<std::string>>(values_);
  std::set<std::string_view> distinct;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!missing_[i]) distinct.insert(values[i]);
  return ColumnKind::categorical(distinct.size());
}

std::span<const double> Column::numeric_values() const {
  const auto* v = std::get_if<std::vector<double>>(&values_);
  if (!v) throw UsageError("column '" + name_ + "' is categorical, numeric values requested");
  return *v;
}

std::span<const std::string> Column::categorical_values() const {
  const auto* v = std::get_if<std::vector<std::string>>(&values_);
  if (!v) throw UsageError("column '" + name_ + "' is numeric, categories requested");
  return *v;
}

std::size_t Column::missing_count() const {
  return static_cast<std::size_t>(std::count_if(missing_.begin(), missing_.end(),
                                                [](std::uint8_t m) { return m != 0; }));
}

Cell Column::cell(std::size_t row) const {
  if (missing_.at(row)) throw UsageError("cell " + std::to_string(row) + " of '" + name_ + "' is masked");
  if (is_numeric()) return std::get<std::vector<double>>(values_)[row];
  return std::get<std::vector<std::string>>(values_)[row];
}

void Column::set(std::size_t row, double value) {
  auto* v = std::get_if<std::vector<double>>(&values_);
  if (!v) throw UsageError("numeric value written to categorical column '" + name_ + "'");
  v->at(row) = value;
  missing_[row] = 0;
}

void Column::set(std::size_t row, std::string value) {
  auto* v = std::get_if<std::vector<std::string>>(&values_);
  if (!v) throw UsageError("category written to numeric column '" + name_ + "'");
  v->at(row) = std::move(value);
  missing_[row] = 0;
}

void Column::set(std::size_t row, const Cell& value) {
  std::visit([&](const auto& v) { set(row, v); }, value);
}

void Column::mask(std::size_t row) {
  missing_.at(row) = 1;
  std::visit(
      [&](auto& v) {
        using V = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<V, std::vector<double>>) v[row] = kMaskedNumeric;
        else v[row].clear();
      },
      values_);
}

Column Column::select_rows(std::span<const std::size_t> rows) const {
  MissingMask mask;
  mask.reserve(rows.size());
  for (auto r : rows) mask.push_back(missing_.at(r));
  return std::visit(
      [&](const auto& v) {
        std::decay_t<decltype(v)> out;
        out.reserve(rows.size());
        for (auto r : rows) out.push_back(v[r]);
        return Column(name_, std::move(out), mask);
      },
      values_);
}

bool operator==(const Column& a, const Column& b) {
  if (a.name_ != b.name_ || a.missing_ != b.missing_ || a.is_numeric() != b.is_numeric()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a.missing_[i]) continue;
    if (a.cell(i) != b.cell(i)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Dataset

Dataset::Dataset(std::vector<Column> columns) {
  for (auto& c : columns) add_column(std::move(c));
}

const Column& Dataset::column(std::size_t index) const {
  if (index >= columns_.size()) throw UsageError("column index " + std::to_string(index) + " out of range");
  return columns_[index];
}

const Column& Dataset::column(std::string_view name) const { return columns_[index_of(name)]; }

std::vector<std::string> Dataset::names() const {
  std::vector<std::string> out;
  out.reserve(columns_.size());
  for (const auto& c : columns_) out.push_back(c.name());
  return out;
}

std::optional<std::size_t> Dataset::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Dataset::index_of(std::string_view name) const {
  auto idx = find(name);
  if (!idx) throw UsageError("no column named '" + std::string(name) + "'");
  return *idx;
}

std::size_t Dataset::missing_count() const {
  std::size_t total = 0;
  for (const auto& c : columns_) total += c.missing_count();
  return total;
}

void Dataset::add_column(Column column) {
  if (index_.contains(column.name())) throw SchemaError("duplicate column name '" + column.name() + "'");
  if (!columns_.empty() && column.size() != n_rows_)
    throw SchemaError("column '" + column.name() + "' has " + std::to_string(column.size()) +
                      " rows, expected " + std::to_string(n_rows_));
  if (columns_.empty()) n_rows_ = column.size();
  index_.emplace(column.name(), columns_.size());
  columns_.push_back(std::move(column));
}

void Dataset::replace_column(std::size_t index, Column column) {
  splice_column(index, {std::move(column)});
}

void Dataset::splice_column(std::size_t index, std::vector<Column> replacement) {
  if (index >= columns_.size()) throw UsageError("column index out of range");
  std::vector<Column> next;
  next.reserve(columns_.size() + replacement.size());
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (i == index) {
      for (auto& c : replacement) next.push_back(std::move(c));
    } else {
      next.push_back(columns_[i]);
    }
  }
  // Re-runs the name and length validation of add_column on the whole set.
  Dataset rebuilt(std::move(next));
  if (!rebuilt.empty() && rebuilt.n_rows() != n_rows_)
    throw SchemaError("replacement columns change the row count");
  *this = std::move(rebuilt);
}

void Dataset::set(std::size_t col, std::size_t row, const Cell& value) {
  if (col >= columns_.size()) throw UsageError("column index out of range");
  columns_[col].set(row, value);
}

void Dataset::set(std::size_t col, std::size_t row, double value) {
  if (col >= columns_.size()) throw UsageError("column index out of range");
  columns_[col].set(row, value);
}

void Dataset::mask(std::size_t col, std::size_t row) {
  if (col >= columns_.size()) throw UsageError("column index out of range");
  columns_[col].mask(row);
}

Dataset Dataset::select_rows(std::span<const std::size_t> rows) const {
  Dataset out;
  for (const auto& c : columns_) out.add_column(c.select_rows(rows));
  out.n_rows_ = rows.size();
  return out;
}

bool operator==(const Dataset& a, const Dataset& b) {
  return a.n_rows_ == b.n_rows_ && a.columns_ == b.columns_;
}

// ---------------------------------------------------------------------------
// Statistics

ColumnStats column_stats(const Dataset& d, std::string_view name) {
  const Column& col = d.column(name);
  ColumnStats stats;
  stats.missing = col.missing_count();
  if (col.observed_count() == 0) return stats;

  if (col.is_numeric()) {
    auto values = col.numeric_values();
    double sum = 0.0;
    std::size_t n = 0;
    std::map<double, std::size_t> counts;
    for (std::size_t i = 0; i < col.size(); ++i) {
      if (col.is_missing(i)) continue;
      sum += values[i];
      ++n;
      ++counts[values[i]];
    }
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < col.size(); ++i)
      if (!col.is_missing(i)) ss += (values[i] - mean) * (values[i] - mean);
    stats.mean = mean;
    stats.stddev = std::sqrt(ss / static_cast<double>(n));
    // std::map iterates in ascending order and max_element keeps the first maximum.
    auto best = std::max_element(counts.begin(), counts.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    stats.mode = best->first;
  } else {
    auto values = col.categorical_values();
    std::map<std::string_view, std::size_t> counts;
    for (std::size_t i = 0; i < col.size(); ++i)
      if (!col.is_missing(i)) ++counts[values[i]];
    auto best = std::max_element(counts.begin(), counts.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    stats.mode = std::string(best->first);
  }
  return stats;
}

}  // namespace fcmi
