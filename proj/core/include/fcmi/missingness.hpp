#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcmi/dataset.hpp"

namespace fcmi {

enum class Mechanism { MCAR, MAR };

Mechanism parse_mechanism(std::string_view text);
std::string_view to_string(Mechanism m);

struct MissingnessSpec {
  double rate = 0.10;
  Mechanism mechanism = Mechanism::MCAR;
  std::vector<std::string> excluded_columns;
  std::uint64_t seed = 0;
  /// Column whose rank drives row selection under MAR. Never masked itself.
  std::optional<std::string> mar_driver;
};

struct TruthCell {
  std::size_t row = 0;
  std::string column;
  Cell value;

  friend bool operator==(const TruthCell&, const TruthCell&) = default;
};

using GroundTruthCells = std::vector<TruthCell>;

/// Number of rows that receive a masked cell: rate * n_rows rounded half-up.
std::size_t injected_cell_count(double rate, std::size_t n_rows);

/// Masks exactly injected_cell_count(rate, n_rows) cells, at most one per row,
/// never in an excluded column. Under MCAR rows are drawn uniformly; under MAR
/// a row's selection weight is the rank of its mar_driver value. Deterministic
/// in (d, spec). Returned ground truth is sorted by row.
std::pair<Dataset, GroundTruthCells> inject_missing(const Dataset& d, const MissingnessSpec& spec);

/// Writes the ground-truth values back into their cells.
Dataset restore(const Dataset& d, const GroundTruthCells& truth);

struct MissingReport {
  std::vector<std::pair<std::string, std::size_t>> per_column;
  std::size_t total = 0;
};

MissingReport missing_report(const Dataset& d);

/// Ground truth as CSV with header "row,column,value".
void write_truth_csv(const GroundTruthCells& truth, std::ostream& out);
void write_truth_csv(const GroundTruthCells& truth, const std::filesystem::path& path);
/// Values are typed using the kinds of `reference` (the injected dataset).
GroundTruthCells read_truth_csv(const std::filesystem::path& path, const Dataset& reference);

}  // namespace fcmi
