// Slow, definitional reference implementations used to check the library.
// Deliberately share no code with core/.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fcmi/dataset.hpp"

namespace fcmi::oracle {

/// Pearson r over integer-valued inputs, using exact integer moment sums.
inline std::optional<double> pearson_exact(const std::vector<int>& x, const std::vector<bool>& xm,
                                           const std::vector<int>& y, const std::vector<bool>& ym) {
  long long n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (xm[i] || ym[i]) continue;
    ++n;
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    syy += y[i] * y[i];
    sxy += x[i] * y[i];
  }
  if (n < 2) return std::nullopt;
  const long long cov = n * sxy - sx * sy;
  const long long vx = n * sxx - sx * sx;
  const long long vy = n * syy - sy * sy;
  if (vx == 0 || vy == 0) return std::nullopt;
  return static_cast<double>(static_cast<long double>(cov) /
                             std::sqrt(static_cast<long double>(vx) * static_cast<long double>(vy)));
}

/// Pearson r from the textbook definition in long double.
inline double pearson_definition(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n;
  my /= n;
  long double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my);
    vx += (x[i] - mx) * (x[i] - mx);
    vy += (y[i] - my) * (y[i] - my);
  }
  return static_cast<double>(cov / std::sqrt(vx * vy));
}

/// Solves A x = b by Gaussian elimination with partial pivoting (long double).
inline std::vector<double> solve(std::vector<std::vector<long double>> a, std::vector<long double> b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    std::swap(b[c], b[piv]);
    for (std::size_t r = c + 1; r < n; ++r) {
      const long double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  std::vector<double> x(n);
  for (std::size_t i = n; i-- > 0;) {
    long double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = static_cast<double>(s / a[i][i]);
  }
  return x;
}

/// Ordinary least squares with intercept via the normal equations.
/// rows[i] holds the predictors of sample i. Returns (w_1..w_p, intercept).
inline std::vector<double> ols_normal_equations(const std::vector<std::vector<double>>& rows,
                                                const std::vector<double>& y) {
  const std::size_t p = rows.front().size() + 1;
  std::vector<std::vector<long double>> xtx(p, std::vector<long double>(p, 0));
  std::vector<long double> xty(p, 0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<long double> xi(rows[i].begin(), rows[i].end());
    xi.push_back(1);
    for (std::size_t a = 0; a < p; ++a) {
      xty[a] += xi[a] * y[i];
      for (std::size_t b = 0; b < p; ++b) xtx[a][b] += xi[a] * xi[b];
    }
  }
  return solve(std::move(xtx), std::move(xty));
}

/// Exhaustive KNN imputation: all donor distances are computed and fully
/// sorted, then the first k donors vote.
inline Dataset knn_exhaustive(const Dataset& d, std::size_t k) {
  const std::size_t n = d.n_rows();
  std::vector<std::vector<std::optional<double>>> z;
  for (const auto& c : d.columns()) {
    if (!c.is_numeric() || c.observed_count() == 0) continue;
    std::vector<double> obs;
    for (std::size_t i = 0; i < n; ++i)
      if (!c.is_missing(i)) obs.push_back(c.numeric_values()[i]);
    double mean = 0;
    for (double v : obs) mean += v;
    mean /= static_cast<double>(obs.size());
    double var = 0;
    for (double v : obs) var += (v - mean) * (v - mean);
    double sd = std::sqrt(var / static_cast<double>(obs.size()));
    if (var == 0) sd = 1;
    std::vector<std::optional<double>> col(n);
    for (std::size_t i = 0; i < n; ++i)
      if (!c.is_missing(i)) col[i] = (c.numeric_values()[i] - mean) / sd;
    z.push_back(std::move(col));
  }

  Dataset out = d;
  for (std::size_t j = 0; j < d.n_cols(); ++j) {
    const Column& t = d.column(j);
    for (std::size_t r = 0; r < n; ++r) {
      if (!t.is_missing(r)) continue;
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t s = 0; s < n; ++s) {
        if (s == r || t.is_missing(s)) continue;
        double sq = 0;
        int shared = 0;
        for (const auto& col : z) {
          if (!col[r] || !col[s]) continue;
          sq += (*col[r] - *col[s]) * (*col[r] - *col[s]);
          ++shared;
        }
        if (shared > 0) all.emplace_back(std::sqrt(sq / shared), s);
      }
      std::sort(all.begin(), all.end());
      if (all.empty()) {
        // Mean / mode over observers.
        if (t.is_numeric()) {
          double s = 0;
          for (std::size_t i = 0; i < n; ++i)
            if (!t.is_missing(i)) s += t.numeric_values()[i];
          out.set(j, r, s / static_cast<double>(t.observed_count()));
        } else {
          std::map<std::string, int> freq;
          for (std::size_t i = 0; i < n; ++i)
            if (!t.is_missing(i)) ++freq[t.categorical_values()[i]];
          std::string best;
          int hi = -1;
          for (const auto& [cat, f] : freq)
            if (f > hi) hi = f, best = cat;
          out.set(j, r, Cell{best});
        }
        continue;
      }
      all.resize(std::min(k, all.size()));
      if (t.is_numeric()) {
        double s = 0;
        for (const auto& [dist, row] : all) s += t.numeric_values()[row];
        out.set(j, r, s / static_cast<double>(all.size()));
      } else {
        std::map<std::string, int> freq;
        for (const auto& [dist, row] : all) ++freq[t.categorical_values()[row]];
        std::string best;
        int hi = -1;
        for (const auto& [cat, f] : freq)
          if (f > hi) hi = f, best = cat;
        out.set(j, r, Cell{best});
      }
    }
  }
  return out;
}

}  // namespace fcmi::oracle
