#include "fcmi/loss.hpp"

#include <algorithm>
#include <cmath>

#include "fcmi/error.hpp"

namespace fcmi {

namespace {

Eigen::MatrixXd softmax_rows(const Eigen::MatrixXd& logits) {
  Eigen::MatrixXd p(logits.rows(), logits.cols());
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    const double shift = logits.row(i).maxCoeff();
    p.row(i) = (logits.row(i).array() - shift).exp();
    p.row(i) /= p.row(i).sum();
  }
  return p;
}

std::optional<double> pearson_dense(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return pearson(std::span<const double>(x.data(), static_cast<std::size_t>(x.size())),
                 std::span<const double>(y.data(), static_cast<std::size_t>(y.size())));
}

std::size_t label_of(double code, std::size_t classes) {
  const long c = std::lround(code);
  if (c < 0 || static_cast<std::size_t>(c) >= classes)
    throw UsageError("label code " + std::to_string(c) + " outside [0, " + std::to_string(classes) + ")");
  return static_cast<std::size_t>(c);
}

}  // namespace

LossBreakdown combine_loss(double data_term, const CorrelationDistribution& p, const CorrelationDistribution& q,
                           double kl_weight) {
  LossBreakdown out;
  out.data_term = data_term;
  out.kl = kl_divergence(p, q);
  out.total = data_term + kl_weight * out.kl;
  return out;
}

std::vector<double> signal_correlations(const Eigen::VectorXd& signal, const Eigen::MatrixXd& predictors) {
  std::vector<double> r(static_cast<std::size_t>(predictors.cols()), 0.0);
  for (Eigen::Index k = 0; k < predictors.cols(); ++k)
    r[static_cast<std::size_t>(k)] = pearson_dense(signal, predictors.col(k)).value_or(0.0);
  return r;
}

Eigen::VectorXd expected_code(const Eigen::MatrixXd& probs) {
  Eigen::VectorXd codes = Eigen::VectorXd::LinSpaced(probs.cols(), 0.0, static_cast<double>(probs.cols() - 1));
  return probs * codes;
}

LossBreakdown fcmi_loss(const Eigen::VectorXd& y_true, const Eigen::MatrixXd& y_pred,
                        const Eigen::MatrixXd& predictors, const CorrelationDistribution& p,
                        const ColumnKind& kind, double kl_weight) {
  const Eigen::Index n = y_true.size();
  if (y_pred.rows() != n || predictors.rows() != n) throw UsageError("fcmi_loss: batch length mismatch");
  if (n < 2) throw DegenerateBatch("fcmi_loss needs at least 2 rows to correlate predictions");
  if (static_cast<std::size_t>(predictors.cols()) != p.size())
    throw UsageError("fcmi_loss: P has " + std::to_string(p.size()) + " entries for " +
                     std::to_string(predictors.cols()) + " predictors");
  if (kl_weight < 0.0) throw UsageError("fcmi_loss: negative KL weight");

  double data_term = 0.0;
  Eigen::VectorXd signal;
  if (kind.is_numeric()) {
    if (y_pred.cols() != 1) throw UsageError("fcmi_loss: numeric predictions must be a single column");
    signal = y_pred.col(0);
    data_term = (signal - y_true).squaredNorm() / static_cast<double>(n);
  } else {
    const auto classes = static_cast<std::size_t>(y_pred.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const double py = y_pred(i, static_cast<Eigen::Index>(label_of(y_true[i], classes)));
      data_term -= std::log(std::clamp(py, kProbabilityClamp, 1.0 - kProbabilityClamp));
    }
    data_term /= static_cast<double>(n);
    signal = expected_code(y_pred);
  }
  return combine_loss(data_term, p, to_distribution(signal_correlations(signal, predictors)), kl_weight);
}

// ---------------------------------------------------------------------------

FcmiObjective::FcmiObjective(Eigen::MatrixXd features, Eigen::VectorXd target, CorrelationDistribution p,
                             ColumnKind kind, double kl_weight)
    : features_(std::move(features)),
      target_(std::move(target)),
      p_(std::move(p)),
      kind_(kind),
      kl_weight_(kl_weight),
      classes_(kind.is_numeric() ? 1 : kind.cardinality) {
  if (features_.rows() != target_.size()) throw UsageError("objective: feature/target row mismatch");
  if (static_cast<std::size_t>(features_.cols()) != p_.size())
    throw UsageError("objective: P length differs from predictor count");
  if (classes_ == 0) throw UsageError("objective: categorical target without categories");
  if (!kind_.is_numeric())
    for (Eigen::Index i = 0; i < target_.size(); ++i) label_of(target_[i], classes_);
}

std::size_t FcmiObjective::parameter_count() const {
  return (static_cast<std::size_t>(features_.cols()) + 1) * classes_;
}

Eigen::MatrixXd FcmiObjective::predict(const Eigen::VectorXd& theta) const {
  if (static_cast<std::size_t>(theta.size()) != parameter_count())
    throw UsageError("objective: parameter vector has wrong length");
  const Eigen::Index k = features_.cols();
  const auto c = static_cast<Eigen::Index>(classes_);
  Eigen::Map<const Eigen::MatrixXd> w(theta.data(), k, c);
  Eigen::Map<const Eigen::RowVectorXd> b(theta.data() + k * c, c);
  Eigen::MatrixXd out = features_ * w;
  out.rowwise() += b;
  if (is_linear()) return out;
  return softmax_rows(out);
}

LossBreakdown FcmiObjective::evaluate(const Eigen::VectorXd& theta) const {
  return fcmi_loss(target_, predict(theta), features_, p_, kind_, kl_weight_);
}

Eigen::VectorXd FcmiObjective::kl_signal_gradient(const Eigen::VectorXd& signal) const {
  const Eigen::Index n = signal.size();
  const auto k = static_cast<std::size_t>(features_.cols());
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(n);

  const Eigen::VectorXd s_c = signal.array() - signal.mean();
  const double s_ss = s_c.squaredNorm();

  // Forward pass, keeping the intermediates of r -> a -> Q~ -> Q' -> Q.
  std::vector<double> r(k, 0.0), a(k), q_tilde(k), q_prime(k), q(k);
  std::vector<bool> defined(k, false), clamped(k, false);
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    if (auto rj = pearson_dense(signal, features_.col(col))) {
      r[j] = *rj;
      defined[j] = true;
    }
    a[j] = std::abs(r[j]) + kCorrelationFloor;
  }
  double a_sum = 0.0;
  for (double v : a) a_sum += v;
  bool any_clamped = false;
  for (std::size_t j = 0; j < k; ++j) {
    q_tilde[j] = a[j] / a_sum;
    q_prime[j] = std::clamp(q_tilde[j], kKlClampFloor, 1.0);
    clamped[j] = q_prime[j] != q_tilde[j];
    any_clamped = any_clamped || clamped[j];
  }
  double t = 1.0;
  if (any_clamped) {
    t = 0.0;
    for (double v : q_prime) t += v;
  }
  for (std::size_t j = 0; j < k; ++j) q[j] = q_prime[j] / t;

  // Backward pass.
  std::vector<double> g_q(k), g_qp(k), g_qt(k), g_a(k);
  for (std::size_t j = 0; j < k; ++j) g_q[j] = 1.0 - p_.probs[j] / q[j];
  if (any_clamped) {
    double dot = 0.0;
    for (std::size_t j = 0; j < k; ++j) dot += g_q[j] * q_prime[j];
    for (std::size_t j = 0; j < k; ++j) g_qp[j] = g_q[j] / t - dot / (t * t);
  } else {
    g_qp = g_q;
  }
  for (std::size_t j = 0; j < k; ++j) g_qt[j] = clamped[j] ? 0.0 : g_qp[j];
  double dot = 0.0;
  for (std::size_t j = 0; j < k; ++j) dot += g_qt[j] * a[j];
  for (std::size_t j = 0; j < k; ++j) g_a[j] = g_qt[j] / a_sum - dot / (a_sum * a_sum);

  if (s_ss <= 0.0) return grad;
  for (std::size_t j = 0; j < k; ++j) {
    if (!defined[j] || r[j] == 0.0) continue;
    const double g_r = g_a[j] * (r[j] > 0.0 ? 1.0 : -1.0);
    const auto col = static_cast<Eigen::Index>(j);
    const Eigen::VectorXd z_c = features_.col(col).array() - features_.col(col).mean();
    const double z_ss = z_c.squaredNorm();
    // d r / d s_i = z_c_i / sqrt(s_ss z_ss) - r s_c_i / s_ss
    grad += g_r * (z_c / std::sqrt(s_ss * z_ss) - r[j] * s_c / s_ss);
  }
  return grad;
}

Eigen::VectorXd FcmiObjective::gradient(const Eigen::VectorXd& theta) const {
  const Eigen::Index n = features_.rows();
  const Eigen::Index k = features_.cols();
  const auto c = static_cast<Eigen::Index>(classes_);
  const Eigen::MatrixXd pred = predict(theta);

  // Gradient with respect to the pre-activation outputs (n x c).
  Eigen::MatrixXd g_out(n, c);
  if (is_linear()) {
    g_out.col(0) = 2.0 * (pred.col(0) - target_) / static_cast<double>(n);
    if (kl_weight_ != 0.0) g_out.col(0) += kl_weight_ * kl_signal_gradient(pred.col(0));
  } else {
    g_out = pred;
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto y = static_cast<Eigen::Index>(label_of(target_[i], classes_));
      const double py = pred(i, y);
      if (py < kProbabilityClamp || py > 1.0 - kProbabilityClamp) {
        g_out.row(i).setZero();  // clamp is flat here
      } else {
        g_out(i, y) -= 1.0;
      }
    }
    g_out /= static_cast<double>(n);
    if (kl_weight_ != 0.0) {
      const Eigen::VectorXd s = expected_code(pred);
      const Eigen::VectorXd g_s = kl_weight_ * kl_signal_gradient(s);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
          g_out(i, j) += g_s[i] * pred(i, j) * (static_cast<double>(j) - s[i]);
    }
  }

  Eigen::VectorXd grad(static_cast<Eigen::Index>(parameter_count()));
  Eigen::Map<Eigen::MatrixXd>(grad.data(), k, c) = features_.transpose() * g_out;
  Eigen::Map<Eigen::RowVectorXd>(grad.data() + k * c, c) = g_out.colwise().sum();
  return grad;
}

}  // namespace fcmi
