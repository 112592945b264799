#include "fcmi/regressor.hpp"

#include <algorithm>
#include <cmath>

#include "fcmi/error.hpp"

namespace fcmi {

namespace {

constexpr int kMaxHalvings = 40;

Standardization standardization_of(const Eigen::VectorXd& v) {
  Standardization s;
  s.mean = v.mean();
  const double var = (v.array() - s.mean).square().mean();
  s.scale = var > 0.0 ? std::sqrt(var) : 1.0;
  return s;
}

}  // namespace

void FcmiConfig::validate() const {
  if (k == 0) throw UsageError("FCMI K must be positive");
  if (!(learning_rate > 0.0)) throw UsageError("FCMI learning rate must be positive");
  if (max_iters == 0) throw UsageError("FCMI max_iters must be positive");
  if (!(tol > 0.0)) throw UsageError("FCMI tolerance must be positive");
  if (!(kl_weight >= 0.0)) throw UsageError("FCMI KL weight must be nonnegative");
}

Eigen::MatrixXd RegressionModel::standardize(const Eigen::MatrixXd& raw) const {
  if (static_cast<std::size_t>(raw.cols()) != features.size())
    throw UsageError("model expects " + std::to_string(features.size()) + " predictors, got " +
                     std::to_string(raw.cols()));
  Eigen::MatrixXd z(raw.rows(), raw.cols());
  for (Eigen::Index j = 0; j < raw.cols(); ++j) {
    const auto& s = features[static_cast<std::size_t>(j)];
    z.col(j) = (raw.col(j).array() - s.mean) / s.scale;
  }
  return z;
}

Eigen::MatrixXd RegressionModel::probabilities(const Eigen::MatrixXd& raw) const {
  if (kind != ModelKind::Softmax) throw UsageError("probabilities requested from a linear model");
  Eigen::MatrixXd logits = standardize(raw) * weights;
  logits.rowwise() += bias.transpose();
  for (Eigen::Index i = 0; i < logits.rows(); ++i) {
    logits.row(i).array() -= logits.row(i).maxCoeff();
    logits.row(i) = logits.row(i).array().exp();
    logits.row(i) /= logits.row(i).sum();
  }
  return logits;
}

Eigen::VectorXd RegressionModel::predict(const Eigen::MatrixXd& raw) const {
  if (kind == ModelKind::Linear) {
    Eigen::VectorXd z = standardize(raw) * weights.col(0);
    z.array() += bias[0];
    return (z.array() * target.scale + target.mean).matrix();
  }
  const Eigen::MatrixXd p = probabilities(raw);
  Eigen::VectorXd codes(p.rows());
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    Eigen::Index best = 0;
    p.row(i).maxCoeff(&best);  // first maximum on ties
    codes[i] = static_cast<double>(best);
  }
  return codes;
}

std::pair<Eigen::VectorXd, double> RegressionModel::raw_coefficients() const {
  if (kind != ModelKind::Linear) throw UsageError("raw coefficients exist only for linear models");
  Eigen::VectorXd w(static_cast<Eigen::Index>(features.size()));
  double intercept = target.mean + target.scale * bias[0];
  for (std::size_t j = 0; j < features.size(); ++j) {
    const auto jj = static_cast<Eigen::Index>(j);
    w[jj] = target.scale * weights(jj, 0) / features[j].scale;
    intercept -= w[jj] * features[j].mean;
  }
  return {w, intercept};
}

Eigen::VectorXd RegressionModel::parameters() const {
  Eigen::VectorXd theta(weights.size() + bias.size());
  theta.head(weights.size()) = Eigen::Map<const Eigen::VectorXd>(weights.data(), weights.size());
  theta.tail(bias.size()) = bias;
  return theta;
}

std::size_t min_training_rows(std::size_t k) { return std::max<std::size_t>(k + 2, 10); }

std::pair<RegressionModel, TrainingReport> fit_regressor(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                                         const CorrelationDistribution& p,
                                                         const ColumnKind& kind, const FcmiConfig& cfg) {
  cfg.validate();
  const auto n = static_cast<std::size_t>(x.rows());
  const auto k = static_cast<std::size_t>(x.cols());
  if (y.size() != x.rows()) throw UsageError("fit_regressor: predictor/target row mismatch");
  if (k == 0) throw UsageError("fit_regressor: no predictors");
  if (n < min_training_rows(k))
    throw InsufficientData("need at least " + std::to_string(min_training_rows(k)) + " training rows, have " +
                           std::to_string(n));

  RegressionModel model;
  model.kind = kind.is_numeric() ? ModelKind::Linear : ModelKind::Softmax;
  model.classes = kind.is_numeric() ? 1 : kind.cardinality;
  for (Eigen::Index j = 0; j < x.cols(); ++j) model.features.push_back(standardization_of(x.col(j)));
  const Eigen::MatrixXd z = model.standardize(x);

  Eigen::VectorXd target = y;
  Eigen::VectorXd theta;
  if (model.kind == ModelKind::Linear) {
    model.target = standardization_of(y);
    target = (y.array() - model.target.mean) / model.target.scale;
    Eigen::MatrixXd design(z.rows(), z.cols() + 1);
    design << z, Eigen::VectorXd::Ones(z.rows());
    theta = design.completeOrthogonalDecomposition().solve(target);
  } else {
    theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>((k + 1) * model.classes));
  }

  const FcmiObjective objective(z, target, p, kind, cfg.kl_weight);
  TrainingReport report;
  LossBreakdown current = objective.evaluate(theta);
  report.trajectory.push_back(current);

  for (std::size_t it = 1; it <= cfg.max_iters; ++it) {
    const Eigen::VectorXd g = objective.gradient(theta);
    if (g.squaredNorm() == 0.0) {
      report.converged = true;
      break;
    }
    double step = cfg.learning_rate;
    bool accepted = false;
    Eigen::VectorXd candidate;
    LossBreakdown next;
    for (int h = 0; h <= kMaxHalvings; ++h, step /= 2.0) {
      candidate = theta - step * g;
      next = objective.evaluate(candidate);
      if (next.total <= current.total) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      report.converged = true;  // no representable descent step left
      break;
    }
    const double delta = current.total - next.total;
    theta = std::move(candidate);
    current = next;
    report.trajectory.push_back(current);
    report.iterations = it;
    if (delta < cfg.tol) {
      report.converged = true;
      break;
    }
  }
  report.gradient_norm = objective.gradient(theta).norm();

  const auto c = static_cast<Eigen::Index>(model.classes);
  const auto kk = static_cast<Eigen::Index>(k);
  model.weights = Eigen::Map<const Eigen::MatrixXd>(theta.data(), kk, c);
  model.bias = theta.tail(c);
  return {std::move(model), std::move(report)};
}

Eigen::MatrixXd predictor_matrix(const Dataset& rows, const PredictorSelection& selection) {
  Eigen::MatrixXd x(static_cast<Eigen::Index>(rows.n_rows()), static_cast<Eigen::Index>(selection.predictors.size()));
  for (std::size_t j = 0; j < selection.predictors.size(); ++j) {
    const Column& c = rows.column(selection.predictors[j]);
    if (!c.is_numeric()) throw UsageError("predictor '" + c.name() + "' is not numeric");
    if (c.missing_count() != 0) throw UsageError("predictor '" + c.name() + "' has masked cells; pre-fill them");
    auto v = c.numeric_values();
    for (std::size_t i = 0; i < v.size(); ++i) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v[i];
  }
  return x;
}

std::pair<RegressionModel, TrainingReport> train_regressor(const Dataset& training_rows,
                                                           const PredictorSelection& selection,
                                                           const CorrelationDistribution& p,
                                                           const ColumnKind& kind, const FcmiConfig& cfg) {
  if (p.size() != selection.predictors.size()) throw UsageError("P length differs from predictor count");
  const Column& target = training_rows.column(selection.target);
  if (!target.is_numeric()) throw UsageError("target '" + target.name() + "' must be numeric or label-encoded");
  if (target.missing_count() != 0) throw UsageError("training rows must observe the target");
  const std::size_t need = min_training_rows(selection.predictors.size());
  if (training_rows.n_rows() < need)
    throw InsufficientData("column '" + target.name() + "' has " + std::to_string(training_rows.n_rows()) +
                           " training rows, needs " + std::to_string(need));

  auto values = target.numeric_values();
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
  return fit_regressor(predictor_matrix(training_rows, selection), y, p, kind, cfg);
}

std::vector<double> predict_missing(const RegressionModel& model, const Dataset& rows,
                                    const PredictorSelection& selection) {
  if (selection.predictors.size() != model.predictor_count())
    throw UsageError("selection has " + std::to_string(selection.predictors.size()) + " predictors, model expects " +
                     std::to_string(model.predictor_count()));
  const Eigen::VectorXd pred = model.predict(predictor_matrix(rows, selection));
  return {pred.data(), pred.data() + pred.size()};
}

}  // namespace fcmi
