#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fcmi/correlation.hpp"
#include "fcmi/dataset.hpp"
#include "fcmi/encoding.hpp"
#include "fcmi/regressor.hpp"

namespace fcmi {

struct FcmiColumnReport {
  std::string column;
  std::size_t imputed_cells = 0;
  std::optional<PredictorSelection> selection;
  std::optional<TrainingReport> training;
  /// Set when the column fell back to mean/mode, with the reason.
  std::optional<std::string> fallback;
};

struct FcmiResult {
  Dataset data;
  std::vector<FcmiColumnReport> columns;  // in imputation order

  std::size_t fallback_count() const;
};

/// Correlation-guided imputation of a label-encoded dataset.
///
/// Columns with masked cells are processed in ascending order of missing
/// count (ties by position). For each one: correlations against every other
/// column on pairwise-complete rows, the top-K predictors by |r|, a
/// regression model trained on the rows observing the column, predictions
/// for the masked rows. Predictor cells still masked at that point are filled
/// with their column mean for the duration of that step only. A column named
/// in `maps` is categorical: it gets a softmax model and its imputed values
/// are label codes. Columns without usable predictors or with too few rows
/// fall back to mean (numeric) or mode (categorical) and are flagged.
///
/// Throws FullyMissingColumn if a column has no observed cell at all.
FcmiResult fcmi_impute(const Dataset& encoded, std::span<const EncodingMap> maps, const FcmiConfig& cfg);

/// Same, for a dataset that may hold categorical string columns: they are
/// label-encoded for the run and decoded in the result.
FcmiResult fcmi_impute(const Dataset& d, const FcmiConfig& cfg);

/// One JSON object per descent iteration:
/// {"column", "iteration", "E", "kl", "total"}.
void write_trace_jsonl(const FcmiResult& result, std::ostream& out);

}  // namespace fcmi
