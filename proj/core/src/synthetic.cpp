#include "fcmi/synthetic.hpp"

#include <string>

#include "fcmi/random.hpp"

namespace fcmi {

Dataset make_linear_synthetic(const LinearSyntheticSpec& spec) {
  Rng rng(spec.seed);
  const std::size_t p = spec.coefficients.size();
  std::vector<std::vector<double>> predictors(p, std::vector<double>(spec.rows));
  std::vector<std::vector<double>> distractors(spec.distractors, std::vector<double>(spec.rows));
  std::vector<double> target(spec.rows);

  for (std::size_t i = 0; i < spec.rows; ++i) {
    double y = 0.0;
    for (std::size_t j = 0; j < p; ++j) {
      predictors[j][i] = rng.normal();
      y += spec.coefficients[j] * predictors[j][i];
    }
    for (auto& d : distractors) d[i] = rng.normal();
    target[i] = y + spec.noise_sigma * rng.normal();
  }

  Dataset d;
  for (std::size_t j = 0; j < p; ++j) d.add_column(Column("k" + std::to_string(j + 1), std::move(predictors[j])));
  for (std::size_t j = 0; j < spec.distractors; ++j)
    d.add_column(Column("d" + std::to_string(j + 1), std::move(distractors[j])));
  d.add_column(Column("target", std::move(target)));
  return d;
}

}  // namespace fcmi
