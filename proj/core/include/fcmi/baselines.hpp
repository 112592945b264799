#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "fcmi/dataset.hpp"

namespace fcmi {

/// Output of the comparison imputers. `flags` lists every place where the
/// imputer had to fall back (one human-readable entry each).
struct ImputeOutcome {
  Dataset data;
  std::vector<std::string> flags;
};

/// Numeric cells get the column mean, categorical cells the column mode
/// (lexicographically smallest on ties). Throws FullyMissingColumn for a
/// column with masked cells and nothing observed.
Dataset mean_mode_impute(const Dataset& d);

struct KnnConfig {
  std::size_t k = 5;
};

/// Each masked cell takes the mean (numeric) or mode (categorical) of that
/// column over its k nearest donor rows. Donors are rows observing the
/// column; distance is Euclidean over the z-scored numeric columns both rows
/// observe, divided by the number of such columns. Distance ties go to the
/// lower row index. Cells with no donor sharing a dimension fall back to
/// mean/mode and are flagged. Imputed values are never used as donors.
ImputeOutcome knn_impute(const Dataset& d, const KnnConfig& cfg = {});

struct IterativeConfig {
  std::size_t sweeps = 10;
  double tol = 1e-4;
};

struct IterativeOutcome : ImputeOutcome {
  std::size_t sweeps_run = 0;
  bool converged = false;
};

/// Chained-equations single imputation ("MICE-lite"). Starts from mean/mode,
/// then each sweep refits every incomplete column on all other columns (least
/// squares for numeric, softmax for categorical) and overwrites the
/// originally masked cells. Numeric predictions are clamped to the observed
/// range. Stops once the largest cell change is below `tol`. Rank-deficient
/// designs are solved with ridge damping 1e-6 and flagged.
IterativeOutcome iterative_impute(const Dataset& d, const IterativeConfig& cfg = {});

}  // namespace fcmi
