#include "fcmi/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <set>

#include <Eigen/Dense>

#include "fcmi/encoding.hpp"
#include "fcmi/error.hpp"
#include "fcmi/regressor.hpp"

namespace fcmi {

namespace {

Cell fill_value(const Column& c) {
  if (c.observed_count() == 0) throw FullyMissingColumn("column '" + c.name() + "' has no observed cells");
  const Dataset single({c});
  const ColumnStats stats = column_stats(single, c.name());
  if (c.is_numeric()) return *stats.mean;
  return *stats.mode;
}

}  // namespace

Dataset mean_mode_impute(const Dataset& d) {
  Dataset out = d;
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    const Column& c = d.column(j);
    if (c.missing_count() == 0) continue;
    const Cell fill = fill_value(c);
    for (std::size_t i = 0; i < c.size(); ++i)
      if (c.is_missing(i)) out.set(j, i, fill);
  }
  return out;
}

// ---------------------------------------------------------------------------
// KNN

ImputeOutcome knn_impute(const Dataset& d, const KnnConfig& cfg) {
  if (cfg.k == 0) throw UsageError("KNN k must be at least 1");
  const std::size_t n = d.n_rows();

  // z-scored copies of the numeric columns.
  std::vector<std::size_t> dims;
  std::vector<std::vector<double>> z;
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    const Column& c = d.column(j);
    if (!c.is_numeric() || c.observed_count() == 0) continue;
    auto v = c.numeric_values();
    double sum = 0.0, ss = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (!c.is_missing(i)) sum += v[i], ++m;
    const double mean = sum / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i)
      if (!c.is_missing(i)) ss += (v[i] - mean) * (v[i] - mean);
    const double sd = ss > 0.0 ? std::sqrt(ss / static_cast<double>(m)) : 1.0;
    std::vector<double> col(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
      if (!c.is_missing(i)) col[i] = (v[i] - mean) / sd;
    dims.push_back(j);
    z.push_back(std::move(col));
  }

  ImputeOutcome out{d, {}};
  std::vector<std::pair<double, std::size_t>> neighbours;
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    const Column& target = d.column(j);
    if (target.missing_count() == 0) continue;
    for (std::size_t r = 0; r < n; ++r) {
      if (!target.is_missing(r)) continue;
      neighbours.clear();
      for (std::size_t s = 0; s < n; ++s) {
        if (s == r || target.is_missing(s)) continue;
        double sq = 0.0;
        std::size_t shared = 0;
        for (std::size_t t = 0; t < dims.size(); ++t) {
          const Column& dim = d.column(dims[t]);
          if (dim.is_missing(r) || dim.is_missing(s)) continue;
          const double diff = z[t][r] - z[t][s];
          sq += diff * diff;
          ++shared;
        }
        if (shared == 0) continue;
        neighbours.emplace_back(std::sqrt(sq / static_cast<double>(shared)), s);
      }

      if (neighbours.empty()) {
        out.data.set(j, r, fill_value(target));
        out.flags.push_back("knn: no donor for row " + std::to_string(r) + " of '" + target.name() +
                            "', used mean/mode");
        continue;
      }
      const std::size_t take = std::min(cfg.k, neighbours.size());
      std::partial_sort(neighbours.begin(), neighbours.begin() + static_cast<std::ptrdiff_t>(take), neighbours.end());

      if (target.is_numeric()) {
        auto v = target.numeric_values();
        double sum = 0.0;
        for (std::size_t t = 0; t < take; ++t) sum += v[neighbours[t].second];
        out.data.set(j, r, sum / static_cast<double>(take));
      } else {
        auto v = target.categorical_values();
        std::map<std::string_view, std::size_t> votes;
        for (std::size_t t = 0; t < take; ++t) ++votes[v[neighbours[t].second]];
        auto best = std::max_element(votes.begin(), votes.end(),
                                     [](const auto& a, const auto& b) { return a.second < b.second; });
        out.data.set(j, r, Cell{std::string(best->first)});
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Chained equations

namespace {

constexpr double kRidgeDamping = 1e-6;

Eigen::MatrixXd other_columns(const Dataset& d, std::size_t exclude, std::span<const std::size_t> rows) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d.n_cols() - 1));
  Eigen::Index col = 0;
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    if (j == exclude) continue;
    auto v = d.column(j).numeric_values();
    for (std::size_t i = 0; i < rows.size(); ++i) x(static_cast<Eigen::Index>(i), col) = v[rows[i]];
    ++col;
  }
  return x;
}

/// Least squares with intercept on z-scored inputs; returns predictions for
/// `x_new`. Sets `ridged` when the design was rank deficient.
Eigen::VectorXd least_squares_predict(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                      const Eigen::MatrixXd& x_new, bool& ridged) {
  const Eigen::RowVectorXd mean = x.colwise().mean();
  Eigen::RowVectorXd sd = ((x.rowwise() - mean).array().square().colwise().mean()).sqrt();
  for (Eigen::Index j = 0; j < sd.size(); ++j)
    if (!(sd[j] > 0.0)) sd[j] = 1.0;
  auto design = [&](const Eigen::MatrixXd& raw) {
    Eigen::MatrixXd a(raw.rows(), raw.cols() + 1);
    a.col(0).setOnes();
    a.rightCols(raw.cols()) = (raw.rowwise() - mean).array().rowwise() / sd.array();
    return a;
  };
  const Eigen::MatrixXd a = design(x);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  Eigen::VectorXd beta;
  if (qr.rank() < a.cols()) {
    ridged = true;
    Eigen::MatrixXd gram = a.transpose() * a;
    for (Eigen::Index j = 1; j < gram.cols(); ++j) gram(j, j) += kRidgeDamping;
    beta = gram.ldlt().solve(a.transpose() * y);
  } else {
    beta = qr.solve(y);
  }
  return design(x_new) * beta;
}

}  // namespace

IterativeOutcome iterative_impute(const Dataset& d, const IterativeConfig& cfg) {
  if (cfg.sweeps == 0) throw UsageError("iterative imputation needs at least one sweep");
  if (!(cfg.tol > 0.0)) throw UsageError("iterative tolerance must be positive");

  const EncodedDataset enc = encode_categoricals(d);
  const Dataset& original = enc.data;
  const std::size_t n = original.n_rows();

  IterativeOutcome out;
  if (original.complete() || original.n_cols() < 2) {
    out.data = d.n_cols() < 2 ? mean_mode_impute(d) : d;
    out.converged = true;
    return out;
  }

  // Mean/mode start.
  Dataset work = original;
  std::vector<std::size_t> incomplete;
  std::vector<std::pair<double, double>> range(original.n_cols());
  for (std::size_t j = 0; j < original.n_cols(); ++j) {
    const Column& c = original.column(j);
    if (c.missing_count() == 0) continue;
    if (c.observed_count() == 0) throw FullyMissingColumn("column '" + c.name() + "' has no observed cells");
    const bool categorical = enc.map_for(c.name()) != nullptr;
    const Dataset single({c});
    const ColumnStats stats = column_stats(single, c.name());
    const double fill = categorical ? std::get<double>(*stats.mode) : *stats.mean;
    auto v = c.numeric_values();
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t i = 0; i < n; ++i) {
      if (c.is_missing(i)) work.set(j, i, fill);
      else lo = std::min(lo, v[i]), hi = std::max(hi, v[i]);
    }
    range[j] = {lo, hi};
    incomplete.push_back(j);
  }

  std::set<std::string> flagged;
  FcmiConfig softmax_cfg;
  softmax_cfg.learning_rate = 0.5;
  softmax_cfg.max_iters = 300;
  softmax_cfg.kl_weight = 0.0;

  for (std::size_t sweep = 1; sweep <= cfg.sweeps; ++sweep) {
    double max_change = 0.0;
    for (auto j : incomplete) {
      const Column& c = original.column(j);
      std::vector<std::size_t> observed, missing;
      for (std::size_t i = 0; i < n; ++i) (c.is_missing(i) ? missing : observed).push_back(i);
      const Eigen::MatrixXd x = other_columns(work, j, observed);
      const Eigen::MatrixXd x_new = other_columns(work, j, missing);
      Eigen::VectorXd y(static_cast<Eigen::Index>(observed.size()));
      auto v = c.numeric_values();
      for (std::size_t i = 0; i < observed.size(); ++i) y[static_cast<Eigen::Index>(i)] = v[observed[i]];

      Eigen::VectorXd pred;
      if (const EncodingMap* map = enc.map_for(c.name())) {
        const auto p = static_cast<std::size_t>(x.cols());
        const CorrelationDistribution uniform{std::vector<double>(p, 1.0 / static_cast<double>(p))};
        try {
          auto fitted = fit_regressor(x, y, uniform, ColumnKind::categorical(map->size()), softmax_cfg);
          pred = fitted.first.predict(x_new);
        } catch (const InsufficientData& e) {
          if (flagged.insert(c.name() + ":rows").second)
            out.flags.push_back("mice-lite: '" + c.name() + "' kept its mode (" + e.what() + ")");
          continue;
        }
      } else {
        bool ridged = false;
        pred = least_squares_predict(x, y, x_new, ridged);
        pred = pred.cwiseMax(range[j].first).cwiseMin(range[j].second);
        if (ridged && flagged.insert(c.name() + ":ridge").second)
          out.flags.push_back("mice-lite: singular design for '" + c.name() + "', ridge damping applied");
      }
      auto current = work.column(j).numeric_values();
      for (std::size_t i = 0; i < missing.size(); ++i) {
        const double next = pred[static_cast<Eigen::Index>(i)];
        max_change = std::max(max_change, std::abs(next - current[missing[i]]));
        work.set(j, missing[i], next);
      }
    }
    out.sweeps_run = sweep;
    if (max_change < cfg.tol) {
      out.converged = true;
      break;
    }
  }
  out.data = decode_categoricals(work, enc.maps);
  return out;
}

}  // namespace fcmi
