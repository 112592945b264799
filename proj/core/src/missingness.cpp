#include "fcmi/missingness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <ostream>

#include "fcmi/csv.hpp"
#include "fcmi/error.hpp"
#include "fcmi/random.hpp"

namespace fcmi {

Mechanism parse_mechanism(std::string_view text) {
  if (text == "mcar" || text == "MCAR") return Mechanism::MCAR;
  if (text == "mar" || text == "MAR") return Mechanism::MAR;
  throw UsageError("unknown missingness mechanism '" + std::string(text) + "' (expected mcar or mar)");
}

std::string_view to_string(Mechanism m) { return m == Mechanism::MCAR ? "mcar" : "mar"; }

std::size_t injected_cell_count(double rate, std::size_t n_rows) {
  if (!(rate >= 0.0 && rate <= 1.0)) throw UsageError("missingness rate must lie in [0, 1]");
  const double exact = rate * static_cast<double>(n_rows);
  return std::min(n_rows, static_cast<std::size_t>(std::floor(exact + 0.5)));
}

namespace {

/// 1-based ranks with ties averaged.
std::vector<double> average_ranks(const Column& c) {
  const std::size_t n = c.size();
  std::vector<Cell> cells;
  cells.reserve(n);
  for (std::size_t i = 0; i < n; ++i) cells.push_back(c.cell(i));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return cells[a] < cells[b]; });

  std::vector<double> ranks(n);
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && cells[order[j + 1]] == cells[order[i]]) ++j;
    const double rank = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

std::vector<std::size_t> uniform_rows(std::size_t n, std::size_t m, Rng& rng) {
  std::vector<std::size_t> rows(n);
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  for (std::size_t i = 0; i < m; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(rows[i], rows[j]);
  }
  rows.resize(m);
  return rows;
}

// Weighted sampling without replacement (Efraimidis-Spirakis): keep the m
// largest keys log(u)/w.
std::vector<std::size_t> weighted_rows(const std::vector<double>& weights, std::size_t m, Rng& rng) {
  const std::size_t n = weights.size();
  std::vector<std::pair<double, std::size_t>> keys(n);
  for (std::size_t i = 0; i < n; ++i) keys[i] = {std::log(rng.uniform_open_zero()) / weights[i], i};
  std::partial_sort(keys.begin(), keys.begin() + static_cast<std::ptrdiff_t>(m), keys.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<std::size_t> rows(m);
  for (std::size_t i = 0; i < m; ++i) rows[i] = keys[i].second;
  return rows;
}

}  // namespace

std::pair<Dataset, GroundTruthCells> inject_missing(const Dataset& d, const MissingnessSpec& spec) {
  const std::size_t m = injected_cell_count(spec.rate, d.n_rows());
  if (!d.complete()) throw UsageError("missingness can only be injected into a fully observed dataset");
  for (const auto& name : spec.excluded_columns) d.index_of(name);

  std::optional<std::size_t> driver;
  if (spec.mechanism == Mechanism::MAR) {
    if (!spec.mar_driver) throw UsageError("MAR missingness requires a driver column");
    driver = d.index_of(*spec.mar_driver);
  }

  std::vector<std::size_t> eligible;
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    const auto& name = d.column(j).name();
    if (driver && *driver == j) continue;
    if (std::find(spec.excluded_columns.begin(), spec.excluded_columns.end(), name) !=
        spec.excluded_columns.end())
      continue;
    eligible.push_back(j);
  }
  if (m == 0) return {d, {}};
  if (eligible.empty()) throw UsageError("no column is eligible for missingness injection");

  Rng rng(spec.seed);
  std::vector<std::size_t> rows = spec.mechanism == Mechanism::MCAR
                                      ? uniform_rows(d.n_rows(), m, rng)
                                      : weighted_rows(average_ranks(d.column(*driver)), m, rng);
  std::sort(rows.begin(), rows.end());

  Dataset out = d;
  GroundTruthCells truth;
  truth.reserve(m);
  for (auto row : rows) {
    const std::size_t col = eligible[static_cast<std::size_t>(rng.below(eligible.size()))];
    truth.push_back({row, d.column(col).name(), d.column(col).cell(row)});
    out.mask(col, row);
  }
  return {std::move(out), std::move(truth)};
}

Dataset restore(const Dataset& d, const GroundTruthCells& truth) {
  Dataset out = d;
  for (const auto& t : truth) out.set(out.index_of(t.column), t.row, t.value);
  return out;
}

MissingReport missing_report(const Dataset& d) {
  MissingReport r;
  for (const auto& c : d.columns()) {
    const auto n = c.missing_count();
    r.per_column.emplace_back(c.name(), n);
    r.total += n;
  }
  return r;
}

void write_truth_csv(const GroundTruthCells& truth, std::ostream& out) {
  out << "row,column,value\n";
  for (const auto& t : truth) out << t.row << ',' << csv_escape(t.column) << ',' << csv_escape(to_string(t.value)) << '\n';
}

void write_truth_csv(const GroundTruthCells& truth, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_truth_csv(truth, out);
}

GroundTruthCells read_truth_csv(const std::filesystem::path& path, const Dataset& reference) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  std::size_t record_no = 0;
  std::vector<std::string> fields;
  if (!read_csv_record(in, fields, record_no) || fields != std::vector<std::string>{"row", "column", "value"})
    throw ParseError("ground-truth file must start with header row,column,value", 1);

  GroundTruthCells truth;
  while (read_csv_record(in, fields, record_no)) {
    if (fields.size() != 3) throw ParseError("expected 3 fields", record_no);
    TruthCell t;
    auto [p, ec] = std::from_chars(fields[0].data(), fields[0].data() + fields[0].size(), t.row);
    if (ec != std::errc{} || p != fields[0].data() + fields[0].size()) throw ParseError("bad row index", record_no);
    t.column = fields[1];
    const auto col = reference.find(t.column);
    if (!col) throw SchemaError("ground truth names unknown column '" + t.column + "'");
    if (t.row >= reference.n_rows()) throw SchemaError("ground-truth row index out of range");
    if (reference.column(*col).is_numeric()) {
      double v = 0.0;
      auto [q, ec2] = std::from_chars(fields[2].data(), fields[2].data() + fields[2].size(), v);
      if (ec2 != std::errc{} || q != fields[2].data() + fields[2].size())
        throw ParseError("bad numeric value '" + fields[2] + "'", record_no);
      t.value = v;
    } else {
      t.value = fields[2];
    }
    truth.push_back(std::move(t));
  }
  return truth;
}

}  // namespace fcmi
