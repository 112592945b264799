#pragma once

#include <cstdint>
#include <vector>

#include "fcmi/dataset.hpp"

namespace fcmi {

/// target = sum_i coefficients[i] * k_i + N(0, noise_sigma^2), with every
/// k_i and distractor d_j drawn i.i.d. N(0, 1). Columns are k1..kp,
/// d1..dm, target.
struct LinearSyntheticSpec {
  std::size_t rows = 1000;
  std::vector<double> coefficients{2.0, -1.0, 0.5};
  double noise_sigma = 0.1;
  std::size_t distractors = 0;
  std::uint64_t seed = 0;
};

Dataset make_linear_synthetic(const LinearSyntheticSpec& spec);

}  // namespace fcmi
