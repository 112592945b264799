#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "fcmi/error.hpp"

namespace fcmi {

/// sqrt(1/n * sum (y_true - y_pred)^2).
double rmse(std::span<const double> y_true, std::span<const double> y_pred);

/// Fraction of positions where the labels agree.
template <typename Label>
double accuracy(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size()) throw UsageError("accuracy: length mismatch");
  if (y_true.empty()) throw UsageError("accuracy: empty input");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i)
    if (y_true[i] == y_pred[i]) ++hits;
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

}  // namespace fcmi
