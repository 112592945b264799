#pragma once

#include <Eigen/Dense>

#include "fcmi/correlation.hpp"
#include "fcmi/dataset.hpp"

namespace fcmi {

/// Data term, correlation-drift term and their weighted sum.
struct LossBreakdown {
  double data_term = 0.0;
  double kl = 0.0;
  double total = 0.0;
};

LossBreakdown combine_loss(double data_term, const CorrelationDistribution& p,
                           const CorrelationDistribution& q, double kl_weight);

/// Correlation of a prediction signal with each predictor column. Undefined
/// correlations (constant signal or predictor) count as 0.
std::vector<double> signal_correlations(const Eigen::VectorXd& signal, const Eigen::MatrixXd& predictors);

/// Value fed to the correlation term for categorical predictions: the
/// expected label code sum_c p_c * c of each row.
Eigen::VectorXd expected_code(const Eigen::MatrixXd& probs);

inline constexpr double kProbabilityClamp = 1e-9;

/// Composite imputation loss over a batch.
///
/// Numeric kind: `y_pred` is n x 1 and the data term is the mean squared
/// error. Categorical kind: `y_true` holds label codes, `y_pred` is the n x c
/// matrix of class probabilities, and the data term is the mean cross-entropy
/// -ln p_y with p clamped to [1e-9, 1 - 1e-9].
///
/// Q is to_distribution() of the correlations between the prediction signal
/// (the prediction itself, or its expected code) and every predictor column;
/// the result is data_term + kl_weight * KL(P || Q).
///
/// Throws DegenerateBatch for batches shorter than 2 rows.
LossBreakdown fcmi_loss(const Eigen::VectorXd& y_true, const Eigen::MatrixXd& y_pred,
                        const Eigen::MatrixXd& predictors, const CorrelationDistribution& p,
                        const ColumnKind& kind, double kl_weight);

/// fcmi_loss as a function of model parameters, with its analytic gradient.
///
/// Linear parameters are [w_1..w_K, b]. Softmax parameters are the K x c
/// weight matrix in column-major order followed by the c biases.
class FcmiObjective {
 public:
  FcmiObjective(Eigen::MatrixXd features, Eigen::VectorXd target, CorrelationDistribution p, ColumnKind kind,
                double kl_weight);

  std::size_t parameter_count() const;
  std::size_t classes() const { return classes_; }
  bool is_linear() const { return kind_.is_numeric(); }

  /// n x 1 predictions (linear) or n x c probabilities (softmax).
  Eigen::MatrixXd predict(const Eigen::VectorXd& theta) const;
  LossBreakdown evaluate(const Eigen::VectorXd& theta) const;
  Eigen::VectorXd gradient(const Eigen::VectorXd& theta) const;

 private:
  /// d KL(P || Q(signal)) / d signal.
  Eigen::VectorXd kl_signal_gradient(const Eigen::VectorXd& signal) const;

  Eigen::MatrixXd features_;
  Eigen::VectorXd target_;
  CorrelationDistribution p_;
  ColumnKind kind_;
  double kl_weight_;
  std::size_t classes_;
};

}  // namespace fcmi
