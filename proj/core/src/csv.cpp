#include "fcmi/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "fcmi/error.hpp"

namespace fcmi {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_decimal(std::string_view token) {
  token = trim(token);
  if (token.empty()) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || !std::isfinite(value))
    return std::nullopt;
  return value;
}

}  // namespace

bool read_csv_record(std::istream& in, std::vector<std::string>& fields, std::size_t& record_no) {
  fields.clear();
  if (in.peek() == std::char_traits<char>::eof()) return false;
  ++record_no;

  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;
  char c;
  while (in.get(c)) {
    if (in_quotes) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      continue;
    }
    if (c == '"') {
      if (!field.empty() || field_was_quoted)
        throw ParseError("stray quote inside unquoted field", record_no);
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      field_was_quoted = false;
    } else if (c == '\r') {
      if (in.peek() == '\n') in.get(c);
      break;
    } else if (c == '\n') {
      break;
    } else {
      if (field_was_quoted) throw ParseError("characters after closing quote", record_no);
      field.push_back(c);
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", record_no);
  fields.push_back(std::move(field));
  return true;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

Dataset read_csv(std::istream& in, const CsvOptions& options) {
  std::size_t record_no = 0;
  std::vector<std::string> header;
  if (!read_csv_record(in, header, record_no)) throw ParseError("missing header row", 1);

  std::vector<std::vector<std::optional<std::string>>> raw(header.size());
  std::vector<std::string> fields;
  while (read_csv_record(in, fields, record_no)) {
    // A trailing blank line is not a record.
    if (fields.size() == 1 && fields[0].empty() && in.peek() == std::char_traits<char>::eof() &&
        header.size() > 1)
      break;
    if (fields.size() != header.size())
      throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       record_no);
    for (std::size_t j = 0; j < fields.size(); ++j) {
      if (options.missing_tokens.contains(fields[j])) raw[j].emplace_back(std::nullopt);
      else raw[j].emplace_back(std::move(fields[j]));
    }
  }

  Dataset d;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (d.find(header[j])) throw SchemaError("duplicate column name '" + header[j] + "'");
    std::vector<std::optional<double>> numbers;
    numbers.reserve(raw[j].size());
    bool numeric = true;
    for (const auto& token : raw[j]) {
      if (!token) {
        numbers.emplace_back(std::nullopt);
        continue;
      }
      auto v = parse_decimal(*token);
      if (!v) {
        numeric = false;
        break;
      }
      numbers.emplace_back(*v);
    }
    if (numeric) d.add_column(Column::numeric(header[j], std::move(numbers)));
    else d.add_column(Column::categorical(header[j], std::move(raw[j])));
  }
  return d;
}

Dataset read_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_csv(in, options);
}

void write_csv(const Dataset& d, std::ostream& out) {
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    if (j) out << ',';
    out << csv_escape(d.column(j).name());
  }
  out << '\n';
  for (std::size_t i = 0; i < d.n_rows(); ++i) {
    for (std::size_t j = 0; j < d.n_cols(); ++j) {
      if (j) out << ',';
      const Column& c = d.column(j);
      if (c.is_missing(i)) continue;
      out << csv_escape(to_string(c.cell(i)));
    }
    out << '\n';
  }
}

void write_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_csv(d, out);
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace fcmi
