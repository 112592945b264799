#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fcmi/correlation.hpp"
#include "fcmi/dataset.hpp"
#include "fcmi/loss.hpp"

namespace fcmi {

struct FcmiConfig {
  std::size_t k = 3;
  double learning_rate = 0.01;
  std::size_t max_iters = 1000;
  double tol = 1e-8;
  double kl_weight = 1.0;
  /// Training is deterministic; the seed is carried for reproducibility
  /// records and run bookkeeping.
  std::uint64_t seed = 0;

  /// Throws UsageError on non-positive K, rate, iteration count or tolerance,
  /// or a negative KL weight.
  void validate() const;
};

struct Standardization {
  double mean = 0.0;
  double scale = 1.0;  // always > 0
};

enum class ModelKind { Linear, Softmax };

/// Linear or softmax regression over z-scored predictors.
struct RegressionModel {
  ModelKind kind = ModelKind::Linear;
  std::size_t classes = 1;
  Eigen::MatrixXd weights;  // K x 1 (linear) or K x c (softmax)
  Eigen::VectorXd bias;     // 1 or c entries
  std::vector<Standardization> features;
  Standardization target;  // linear only

  std::size_t predictor_count() const { return features.size(); }

  /// Model inputs in z-score units.
  Eigen::MatrixXd standardize(const Eigen::MatrixXd& raw) const;
  /// Class probabilities (softmax only), n x c.
  Eigen::MatrixXd probabilities(const Eigen::MatrixXd& raw) const;
  /// Predictions in the target's units; argmax label code for softmax.
  Eigen::VectorXd predict(const Eigen::MatrixXd& raw) const;

  /// Linear model re-expressed on the raw predictors: y = w . x + intercept.
  std::pair<Eigen::VectorXd, double> raw_coefficients() const;

  /// Parameters in FcmiObjective layout.
  Eigen::VectorXd parameters() const;
};

struct TrainingReport {
  std::size_t iterations = 0;
  std::vector<LossBreakdown> trajectory;  // entry 0 is the initial point
  bool converged = false;
  double gradient_norm = 0.0;
};

/// Minimum training rows for a model on `k` predictors: max(k + 2, 10).
std::size_t min_training_rows(std::size_t k);

/// Fits on raw predictor matrix `x` (n x K) and target `y` (values, or label
/// codes for a categorical kind). Linear models start at the least-squares
/// solution, softmax models at zero; then full-batch gradient descent on
/// fcmi_loss with step halving, so the loss trajectory never increases.
std::pair<RegressionModel, TrainingReport> fit_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                         const CorrelationDistribution& p,
                                                         const ColumnKind& kind, const FcmiConfig& cfg);

/// Extracts the predictor matrix of `selection` from `rows`. Every listed
/// cell must be observed.
Eigen::MatrixXd predictor_matrix(const Dataset& rows, const PredictorSelection& selection);

/// Trains on every row of `training_rows`; the target column must be fully
/// observed there and the predictors observed or pre-filled. Throws
/// InsufficientData below min_training_rows().
std::pair<RegressionModel, TrainingReport> train_regressor(const Dataset& training_rows,
                                                           const PredictorSelection& selection,
                                                           const CorrelationDistribution& p,
                                                           const ColumnKind& kind, const FcmiConfig& cfg);

/// Predicts the target of every row in `rows` (values, or label codes).
std::vector<double> predict_missing(const RegressionModel& model, const Dataset& rows,
                                    const PredictorSelection& selection);

}  // namespace fcmi
