#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fcmi/dataset.hpp"

namespace fcmi {

/// Pearson correlation over the rows observed in both series. Empty masks
/// mean "fully observed". Returns nullopt with fewer than two complete pairs
/// or when either side is constant on those pairs. Result is clamped to [-1, 1].
std::optional<double> pearson(std::span<const double> x, std::span<const std::uint8_t> x_missing,
                              std::span<const double> y, std::span<const std::uint8_t> y_missing);

inline std::optional<double> pearson(std::span<const double> x, std::span<const double> y) {
  return pearson(x, {}, y, {});
}

std::optional<double> pearson(const Column& x, const Column& y);

struct CorrelationEntry {
  std::string column;
  std::size_t position = 0;  // column index in the source dataset
  std::optional<double> r;
};

/// Correlations of one target column against a set of candidates, in
/// dataset column order. Undefined correlations are kept as nullopt.
struct CorrelationVector {
  std::string target;
  std::vector<CorrelationEntry> entries;
};

/// Candidates equal to the target are skipped. Target and candidates must be
/// numeric (label-encode categoricals first).
CorrelationVector correlation_vector(const Dataset& d, std::string_view target,
                                     std::span<const std::string> candidates);

/// Every other numeric column as a candidate.
CorrelationVector correlation_vector(const Dataset& d, std::string_view target);

struct PredictorSelection {
  std::string target;
  std::vector<std::string> predictors;  // k1, k2, ... by descending |r|
  std::vector<double> r_values;
};

/// The top-K entries by |r|; ties keep the earlier column. Undefined entries
/// are skipped. Throws NoPredictors when nothing is defined.
PredictorSelection select_predictors(const CorrelationVector& cv, std::size_t k);

/// Probability vector over predictors. Sums to one.
struct CorrelationDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
};

inline constexpr double kCorrelationFloor = 1e-6;
inline constexpr double kKlClampFloor = 1e-6;

/// p_i = (|r_i| + eps) / sum_j (|r_j| + eps), eps = 1e-6.
CorrelationDistribution to_distribution(std::span<const double> r_values);

/// KL(P || Q) in nats. Q is clamped to [1e-6, 1] and renormalized when any
/// entry was clamped. Zero when P == Q.
double kl_divergence(const CorrelationDistribution& p, const CorrelationDistribution& q);

/// CSV with header "column,r"; undefined correlations are written as empty.
void write_correlation_csv(const CorrelationVector& cv, std::ostream& out);

}  // namespace fcmi
