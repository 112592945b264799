#include "fcmi/correlation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "fcmi/csv.hpp"
#include "fcmi/error.hpp"

namespace fcmi {

std::optional<double> pearson(std::span<const double> x, std::span<const std::uint8_t> x_missing,
                              std::span<const double> y, std::span<const std::uint8_t> y_missing) {
  if (x.size() != y.size()) throw UsageError("pearson: length mismatch");
  if ((!x_missing.empty() && x_missing.size() != x.size()) || (!y_missing.empty() && y_missing.size() != y.size()))
    throw UsageError("pearson: mask length mismatch");

  auto complete = [&](std::size_t i) {
    return (x_missing.empty() || !x_missing[i]) && (y_missing.empty() || !y_missing[i]);
  };

  std::size_t n = 0;
  double sx = 0.0, sy = 0.0;
  bool x_varies = false, y_varies = false;
  double x0 = 0.0, y0 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!complete(i)) continue;
    if (n == 0) {
      x0 = x[i];
      y0 = y[i];
    } else {
      x_varies = x_varies || x[i] != x0;
      y_varies = y_varies || y[i] != y0;
    }
    sx += x[i];
    sy += y[i];
    ++n;
  }
  if (n < 2 || !x_varies || !y_varies) return std::nullopt;

  const double mx = sx / static_cast<double>(n);
  const double my = sy / static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!complete(i)) continue;
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx <= 0.0 || syy <= 0.0) return std::nullopt;
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::optional<double> pearson(const Column& x, const Column& y) {
  return pearson(x.numeric_values(), x.missing(), y.numeric_values(), y.missing());
}

CorrelationVector correlation_vector(const Dataset& d, std::string_view target,
                                     std::span<const std::string> candidates) {
  const Column& t = d.column(target);
  if (!t.is_numeric()) throw UsageError("correlation target '" + std::string(target) + "' is not numeric");

  std::vector<std::size_t> positions;
  for (const auto& name : candidates) {
    const auto pos = d.index_of(name);
    if (name == target) continue;
    if (!d.column(pos).is_numeric())
      throw UsageError("correlation candidate '" + name + "' is not numeric");
    positions.push_back(pos);
  }
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());

  CorrelationVector cv{std::string(target), {}};
  cv.entries.reserve(positions.size());
  for (auto pos : positions) {
    const Column& c = d.column(pos);
    cv.entries.push_back({c.name(), pos, pearson(t, c)});
  }
  return cv;
}

CorrelationVector correlation_vector(const Dataset& d, std::string_view target) {
  std::vector<std::string> candidates;
  for (const auto& c : d.columns())
    if (c.is_numeric() && c.name() != target) candidates.push_back(c.name());
  return correlation_vector(d, target, candidates);
}

PredictorSelection select_predictors(const CorrelationVector& cv, std::size_t k) {
  if (k == 0) throw UsageError("predictor count K must be positive");
  std::vector<const CorrelationEntry*> defined;
  for (const auto& e : cv.entries)
    if (e.r) defined.push_back(&e);
  if (defined.empty()) throw NoPredictors("no column has a defined correlation with '" + cv.target + "'");

  std::stable_sort(defined.begin(), defined.end(), [](const CorrelationEntry* a, const CorrelationEntry* b) {
    const double ra = std::abs(*a->r), rb = std::abs(*b->r);
    if (ra != rb) return ra > rb;
    return a->position < b->position;
  });

  PredictorSelection sel{cv.target, {}, {}};
  for (std::size_t i = 0; i < std::min(k, defined.size()); ++i) {
    sel.predictors.push_back(defined[i]->column);
    sel.r_values.push_back(*defined[i]->r);
  }
  return sel;
}

CorrelationDistribution to_distribution(std::span<const double> r_values) {
  if (r_values.empty()) throw UsageError("to_distribution: empty correlation vector");
  CorrelationDistribution dist;
  dist.probs.reserve(r_values.size());
  double total = 0.0;
  for (double r : r_values) {
    dist.probs.push_back(std::abs(r) + kCorrelationFloor);
    total += dist.probs.back();
  }
  for (double& p : dist.probs) p /= total;
  return dist;
}

double kl_divergence(const CorrelationDistribution& p, const CorrelationDistribution& q) {
  if (p.size() != q.size()) throw UsageError("kl_divergence: length mismatch");

  std::vector<double> qc(q.probs);
  bool clamped = false;
  for (double& v : qc) {
    const double c = std::clamp(v, kKlClampFloor, 1.0);
    clamped = clamped || c != v;
    v = c;
  }
  if (clamped) {
    const double total = std::accumulate(qc.begin(), qc.end(), 0.0);
    for (double& v : qc) v /= total;
  }

  // Summed as q * (x ln x - x + 1) with x = p/q. Equal to sum p ln(p/q) for
  // normalized inputs, but every term is nonnegative.
  double kl = 0.0;
  for (std::size_t i = 0; i < qc.size(); ++i) {
    const double pi = p.probs[i];
    if (pi == qc[i]) continue;
    if (pi == 0.0) {
      kl += qc[i];
      continue;
    }
    const double d = (pi - qc[i]) / qc[i];
    const double term = qc[i] * ((1.0 + d) * std::log1p(d) - d);
    kl += std::max(term, 0.0);
  }
  return kl;
}

void write_correlation_csv(const CorrelationVector& cv, std::ostream& out) {
  out << "column,r\n";
  for (const auto& e : cv.entries) {
    out << csv_escape(e.column) << ',';
    if (e.r) out << to_string(Cell{*e.r});
    out << '\n';
  }
}

}  // namespace fcmi
