#pragma once

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "fcmi/dataset.hpp"

namespace fcmi {

struct CsvOptions {
  /// Field values treated as missing cells.
  std::set<std::string> missing_tokens{"", "NA", "NaN", "?"};
};

/// Parses RFC-4180 CSV (header row required). Columns whose every
/// non-missing token parses as a decimal number become numeric; everything
/// else is categorical.
Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options = {});
Dataset read_csv(std::istream& in, const CsvOptions& options = {});

/// Writes `d` with a header row. Masked cells become empty fields; numbers use
/// the shortest representation that reads back to the same double.
void write_csv(const Dataset& d, const std::filesystem::path& path);
void write_csv(const Dataset& d, std::ostream& out);

/// Low-level record reader shared with the ground-truth and report loaders.
/// Returns false at end of input. `record_no` is incremented per record.
bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& record_no);

/// Quotes a field when it contains a delimiter, quote, or line break.
std::string csv_escape(const std::string& field);

}  // namespace fcmi
