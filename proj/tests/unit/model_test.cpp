#include <cmath>
#include <limits>

#include <gtest/gtest.h>

#include "fcmi/correlation.hpp"
#include "fcmi/error.hpp"
#include "fcmi/loss.hpp"
#include "fcmi/random.hpp"
#include "fcmi/regressor.hpp"
#include "generators.hpp"
#include "oracles.hpp"

namespace fcmi {
namespace {

CorrelationDistribution dist(std::vector<double> v) { return {std::move(v)}; }

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

TEST(Loss, CombineWithHandQ) {
  // E = ((2-1)^2 + (4-4)^2) / 2 = 0.5; KL([.5,.5] || [.6,.4]).
  const double kl = 0.5 * std::log(0.5 / 0.6) + 0.5 * std::log(0.5 / 0.4);
  const LossBreakdown l = combine_loss(0.5, dist({0.5, 0.5}), dist({0.6, 0.4}), 1.0);
  EXPECT_DOUBLE_EQ(l.data_term, 0.5);
  EXPECT_NEAR(l.kl, kl, 1e-12);
  EXPECT_NEAR(l.kl, 0.0204, 5e-5);
  EXPECT_NEAR(l.total, 0.5204, 5e-5);
  EXPECT_NEAR(l.total, l.data_term + l.kl, 1e-12);
}

TEST(Loss, TwoRowBatchDataTerm) {
  // Two rows correlate perfectly with any non-constant predictor, so Q = P
  // here and the total is the data term alone.
  Eigen::MatrixXd pred(2, 2);
  pred << 0, 5, 1, 3;
  const LossBreakdown l =
      fcmi_loss(vec({2, 4}), vec({1, 4}), pred, dist({0.5, 0.5}), ColumnKind::numeric(), 1.0);
  EXPECT_DOUBLE_EQ(l.data_term, 0.5);
  EXPECT_NEAR(l.kl, 0.0, 1e-12);
  EXPECT_NEAR(l.total, 0.5, 1e-12);
}

TEST(Loss, PerfectPredictionsAndMatchingQ) {
  Eigen::MatrixXd pred(4, 2);
  pred << 1, 1, 2, 3, 3, 2, 4, 4;
  const Eigen::VectorXd y = vec({1, 2, 3, 4});
  const auto q = to_distribution(signal_correlations(y, pred));
  const LossBreakdown l = fcmi_loss(y, y, pred, q, ColumnKind::numeric(), 1.0);
  EXPECT_EQ(l.total, 0.0);
}

TEST(Loss, KlWeightScalesOnlyTheKlTerm) {
  Rng rng(2);
  Eigen::MatrixXd pred = Eigen::MatrixXd::NullaryExpr(12, 3, [&] { return rng.normal(); });
  Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(12, [&] { return rng.normal(); });
  Eigen::VectorXd yp = Eigen::VectorXd::NullaryExpr(12, [&] { return rng.normal(); });
  const auto p = dist({0.7, 0.2, 0.1});
  const LossBreakdown a = fcmi_loss(y, yp, pred, p, ColumnKind::numeric(), 1.0);
  const LossBreakdown b = fcmi_loss(y, yp, pred, p, ColumnKind::numeric(), 3.0);
  EXPECT_DOUBLE_EQ(a.data_term, b.data_term);
  EXPECT_DOUBLE_EQ(a.kl, b.kl);
  EXPECT_NEAR(b.total, a.data_term + 3.0 * a.kl, 1e-12);
}

TEST(Loss, CrossEntropy) {
  // Two classes, probabilities (0.8, 0.2) and (0.4, 0.6), labels 0 and 1.
  Eigen::MatrixXd probs(2, 2);
  probs << 0.8, 0.2, 0.4, 0.6;
  Eigen::MatrixXd pred(2, 1);
  pred << 0, 1;
  const LossBreakdown l =
      fcmi_loss(vec({0, 1}), probs, pred, dist({1.0}), ColumnKind::categorical(2), 0.0);
  EXPECT_NEAR(l.data_term, -(std::log(0.8) + std::log(0.6)) / 2.0, 1e-12);
}

TEST(Loss, Errors) {
  Eigen::MatrixXd pred(1, 1);
  pred << 1;
  EXPECT_THROW(fcmi_loss(vec({1}), vec({1}), pred, dist({1.0}), ColumnKind::numeric(), 1.0), DegenerateBatch);
  Eigen::MatrixXd pred2(2, 2);
  pred2 << 1, 2, 3, 4;
  EXPECT_THROW(fcmi_loss(vec({1, 2}), vec({1, 2}), pred2, dist({1.0}), ColumnKind::numeric(), 1.0), UsageError);
}

double max_relative_error(const FcmiObjective& obj, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd g = obj.gradient(theta);
  double worst = 0.0;
  for (Eigen::Index i = 0; i < theta.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::fabs(theta(i)));
    Eigen::VectorXd up = theta, down = theta;
    up(i) += h;
    down(i) -= h;
    const double fd = (obj.evaluate(up).total - obj.evaluate(down).total) / (2.0 * h);
    worst = std::max(worst, std::fabs(g(i) - fd) / std::max({std::fabs(g(i)), std::fabs(fd), 1e-4}));
  }
  return worst;
}

TEST(Objective, GradientMatchesFiniteDifferencesLinear) {
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(20, 3, [&] { return rng.normal(); });
    Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(20, [&] { return rng.normal(); });
    const FcmiObjective obj(x, y, dist(gen::distribution(rng, 3)), ColumnKind::numeric(), 1.0);
    Eigen::VectorXd theta = Eigen::VectorXd::NullaryExpr(4, [&] { return rng.normal(); });
    EXPECT_LE(max_relative_error(obj, theta), 1e-5);
  }
}

TEST(Objective, GradientMatchesFiniteDifferencesSoftmax) {
  Rng rng(32);
  for (int trial = 0; trial < 25; ++trial) {
    const std::size_t c = 2 + rng.below(3);
    Eigen::MatrixXd x = Eigen::MatrixXd::NullaryExpr(20, 3, [&] { return rng.normal(); });
    Eigen::VectorXd y = Eigen::VectorXd::NullaryExpr(20, [&] { return static_cast<double>(rng.below(c)); });
    const FcmiObjective obj(x, y, dist(gen::distribution(rng, 3)), ColumnKind::categorical(c), 0.7);
    Eigen::VectorXd theta =
        Eigen::VectorXd::NullaryExpr(static_cast<Eigen::Index>(obj.parameter_count()), [&] { return 0.5 * rng.normal(); });
    EXPECT_LE(max_relative_error(obj, theta), 1e-5);
  }
}

struct Problem {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
};

Problem linear_problem(Rng& rng, std::size_t n, const std::vector<double>& w, double intercept, double noise) {
  Problem p{Eigen::MatrixXd(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(w.size())),
            Eigen::VectorXd(static_cast<Eigen::Index>(n))};
  for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
    double v = intercept;
    for (Eigen::Index j = 0; j < p.x.cols(); ++j) {
      p.x(i, j) = 3.0 * rng.normal() + static_cast<double>(j);
      v += w[static_cast<std::size_t>(j)] * p.x(i, j);
    }
    p.y(i) = v + noise * rng.normal();
  }
  return p;
}

std::vector<std::vector<double>> rows_of(const Eigen::MatrixXd& x) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) rows[static_cast<std::size_t>(i)].push_back(x(i, j));
  return rows;
}

TEST(Regressor, RecoversExactLinearMap) {
  Rng rng(4);
  const Problem p = linear_problem(rng, 60, {2.0, 3.0, 0.0}, 0.0, 0.0);
  const auto q = to_distribution(signal_correlations(p.y, p.x));
  const auto [model, report] = fit_regressor(p.x, p.y, q, ColumnKind::numeric(), FcmiConfig{});
  const auto [w, b] = model.raw_coefficients();
  EXPECT_NEAR(w(0), 2.0, 1e-3);
  EXPECT_NEAR(w(1), 3.0, 1e-3);
  EXPECT_NEAR(w(2), 0.0, 1e-3);
  EXPECT_NEAR(b, 0.0, 1e-3);
  EXPECT_LT(report.trajectory.back().data_term, 1e-6);

  Eigen::MatrixXd row(1, 3);
  row << 1, 1, 0;
  EXPECT_NEAR(model.predict(row)(0), 5.0, 1e-3);
}

TEST(Regressor, ZeroKlWeightIsLeastSquares) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Problem p = linear_problem(rng, 30 + rng.below(50), {gen::real(rng, -2, 2), gen::real(rng, -2, 2),
                                                                 gen::real(rng, -2, 2)},
                                     gen::real(rng, -5, 5), 0.5);
    FcmiConfig cfg;
    cfg.kl_weight = 0.0;
    const auto [model, report] =
        fit_regressor(p.x, p.y, dist({1.0 / 3, 1.0 / 3, 1.0 / 3}), ColumnKind::numeric(), cfg);
    const auto want = oracle::ols_normal_equations(rows_of(p.x), std::vector<double>(p.y.data(), p.y.data() + p.y.size()));
    const auto [w, b] = model.raw_coefficients();
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(w(j), want[static_cast<std::size_t>(j)], 1e-4);
    EXPECT_NEAR(b, want[3], 1e-4);
  }
}

TEST(Regressor, TrajectoryNeverIncreases) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Problem p = linear_problem(rng, 40, {1.0, -0.5, 0.2}, 1.0, 2.0);
    FcmiConfig cfg;
    cfg.kl_weight = 5.0;
    cfg.learning_rate = 1.0;
    const auto [model, report] =
        fit_regressor(p.x, p.y, dist(gen::distribution(rng, 3)), ColumnKind::numeric(), cfg);
    ASSERT_EQ(report.trajectory.size(), report.iterations + 1);
    for (std::size_t i = 1; i < report.trajectory.size(); ++i)
      ASSERT_LE(report.trajectory[i].total, report.trajectory[i - 1].total);
    for (const auto& l : report.trajectory) ASSERT_NEAR(l.total, l.data_term + 5.0 * l.kl, 1e-12);
  }
}

TEST(Regressor, KlTermPullsTowardsP) {
  // With a heavy KL weight and a P that disagrees with the data, training
  // must lower KL below its value at the least-squares start.
  Rng rng(7);
  const Problem p = linear_problem(rng, 80, {1.0, 1.0, 1.0}, 0.0, 1.0);
  FcmiConfig cfg;
  cfg.kl_weight = 10.0;
  cfg.learning_rate = 0.5;
  const auto [model, report] = fit_regressor(p.x, p.y, dist({0.8, 0.1, 0.1}), ColumnKind::numeric(), cfg);
  EXPECT_LT(report.trajectory.back().kl, report.trajectory.front().kl);
}

TEST(Regressor, SoftmaxSeparatesClasses) {
  Rng rng(8);
  const Eigen::Index n = 90;
  Eigen::MatrixXd x(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto cls = static_cast<double>(i % 3);
    y(i) = cls;
    x(i, 0) = 4.0 * cls + 0.3 * rng.normal();
    x(i, 1) = rng.normal();
  }
  FcmiConfig cfg;
  cfg.learning_rate = 1.0;
  cfg.max_iters = 500;
  const auto [model, report] = fit_regressor(x, y, dist({0.9, 0.1}), ColumnKind::categorical(3), cfg);
  const Eigen::VectorXd pred = model.predict(x);
  int hits = 0;
  for (Eigen::Index i = 0; i < n; ++i) hits += pred(i) == y(i);
  EXPECT_GE(hits, 88);
  EXPECT_LT(report.trajectory.back().total, report.trajectory.front().total);
}

TEST(Regressor, InsufficientRows) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Random(9, 3);
  Eigen::VectorXd y = Eigen::VectorXd::Random(9);
  EXPECT_EQ(min_training_rows(3), 10u);
  EXPECT_EQ(min_training_rows(12), 14u);
  EXPECT_THROW(fit_regressor(x, y, dist({0.3, 0.3, 0.4}), ColumnKind::numeric(), FcmiConfig{}), InsufficientData);
}

TEST(Regressor, ConfigValidation) {
  FcmiConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = {};
  cfg.learning_rate = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = {};
  cfg.kl_weight = -1;
  EXPECT_THROW(cfg.validate(), UsageError);
  cfg = {};
  cfg.max_iters = 0;
  EXPECT_THROW(cfg.validate(), UsageError);
}

TEST(Model, IdentityLikePrediction) {
  RegressionModel m;
  m.weights = Eigen::MatrixXd(3, 1);
  m.weights << 1, 0, 0;
  m.bias = vec({0});
  m.features.assign(3, Standardization{});
  Eigen::MatrixXd rows(3, 3);
  rows << 2.5, 9, 9, -1, 4, 4, 7, 0, 1;
  const Eigen::VectorXd p = m.predict(rows);
  EXPECT_DOUBLE_EQ(p(0), 2.5);
  EXPECT_DOUBLE_EQ(p(1), -1.0);
  EXPECT_DOUBLE_EQ(p(2), 7.0);
  EXPECT_THROW(m.predict(Eigen::MatrixXd(1, 2)), UsageError);
}

TEST(Model, SoftmaxCertainClass) {
  RegressionModel m;
  m.kind = ModelKind::Softmax;
  m.classes = 3;
  m.weights = Eigen::MatrixXd::Zero(2, 3);
  m.bias = vec({-50, 50, -50});
  m.features.assign(2, Standardization{});
  const Eigen::VectorXd p = m.predict(Eigen::MatrixXd::Random(5, 2));
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_EQ(p(i), 1.0);
}

}  // namespace
}  // namespace fcmi
