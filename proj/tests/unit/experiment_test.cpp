#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fcmi/csv.hpp"
#include "fcmi/error.hpp"
#include "fcmi/experiment.hpp"
#include "fcmi/metrics.hpp"
#include "fcmi/synthetic.hpp"

namespace fcmi {
namespace {

using V = std::vector<double>;

TEST(Metrics, Rmse) {
  EXPECT_NEAR(rmse(V{2, 4, 6, 8, 10}, V{1.6, 4.5, 6.1, 7.9, 10.1}), 0.2966, 5e-5);
  EXPECT_NEAR(rmse(V{2, 4, 6, 8, 10}, V{1.6, 4.5, 6.1, 7.9, 10.1}), std::sqrt(0.44 / 5), 1e-15);
  EXPECT_EQ(rmse(V{1, 2}, V{1, 2}), 0.0);
  EXPECT_NEAR(rmse(V{0, 0}, V{3, 4}), std::sqrt(12.5), 1e-15);
  EXPECT_THROW(rmse(V{1}, V{1, 2}), UsageError);
  EXPECT_THROW(rmse(V{}, V{}), UsageError);
}

TEST(Metrics, Accuracy) {
  using I = std::vector<int>;
  EXPECT_EQ(accuracy<int>(I{1, 1, 0, 1}, I{1, 0, 1, 1}), 0.5);
  EXPECT_EQ(accuracy<int>(I{1, 2}, I{1, 2}), 1.0);
  EXPECT_EQ(accuracy<int>(I{1, 2}, I{2, 1}), 0.0);
  EXPECT_THROW(accuracy<int>(I{}, I{}), UsageError);
}

Dataset synthetic(std::size_t rows, std::vector<double> coef, std::uint64_t seed = 0) {
  LinearSyntheticSpec s;
  s.rows = rows;
  s.coefficients = std::move(coef);
  s.seed = seed;
  return make_linear_synthetic(s);
}

TEST(Experiment, RateZeroScoresNothing) {
  ExperimentSpec spec;
  spec.algorithms = {default_algorithm("mean")};
  spec.seeds = {1};
  spec.missingness.rate = 0.0;
  const ExperimentResult r = run_experiment(synthetic(50, {1.0}), spec);
  ASSERT_EQ(r.runs.size(), 1u);
  EXPECT_EQ(r.runs[0].numeric_cells, 0u);
  EXPECT_FALSE(r.runs[0].rmse);
  EXPECT_TRUE(r.aggregates.empty());
}

TEST(Experiment, Deterministic) {
  ExperimentSpec spec;
  for (const auto& n : algorithm_names()) spec.algorithms.push_back(default_algorithm(n));
  spec.seeds = {3, 4};
  const Dataset d = synthetic(120, {1.0, 2.0});
  std::ostringstream a, b;
  write_results_csv(run_experiment(d, spec), a);
  write_results_csv(run_experiment(d, spec), b);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Experiment, FcmiBeatsMeanOnLinearTarget) {
  ExperimentSpec spec;
  spec.algorithms = {default_algorithm("mean"), default_algorithm("fcmi")};
  spec.seeds = {0, 1, 2, 3, 4};
  spec.missingness.excluded_columns = {"k1"};
  const ExperimentResult r = run_experiment(synthetic(500, {2.0}), spec);
  for (std::size_t i = 0; i < r.runs.size(); i += 2) {
    ASSERT_EQ(r.runs[i].algorithm, "mean");
    ASSERT_EQ(r.runs[i + 1].algorithm, "fcmi");
    EXPECT_LT(*r.runs[i + 1].rmse, *r.runs[i].rmse);
    EXPECT_GT(*r.runs[i + 1].normalized_score, 0.0);
    EXPECT_EQ(*r.runs[i].normalized_score, 0.0);
  }
}

TEST(Experiment, Aggregates) {
  ExperimentSpec spec;
  spec.algorithms = {default_algorithm("mean")};
  spec.seeds = {0, 1, 2};
  const ExperimentResult r = run_experiment(synthetic(100, {1.0}), spec);
  ASSERT_FALSE(r.aggregates.empty());
  const auto& a = r.aggregates[0];
  EXPECT_EQ(a.metric, "rmse");
  EXPECT_EQ(a.runs, 3u);
  const double mean = (*r.runs[0].rmse + *r.runs[1].rmse + *r.runs[2].rmse) / 3;
  EXPECT_NEAR(a.mean, mean, 1e-15);
  double ss = 0;
  for (const auto& run : r.runs) ss += (*run.rmse - mean) * (*run.rmse - mean);
  EXPECT_NEAR(*a.stddev, std::sqrt(ss / 2), 1e-15);
}

TEST(Experiment, ValidationErrors) {
  ExperimentSpec spec;
  spec.seeds = {1};
  EXPECT_THROW(run_experiment(synthetic(20, {1.0}), spec), UsageError);
  spec.algorithms = {default_algorithm("mean")};
  spec.seeds.clear();
  EXPECT_THROW(run_experiment(synthetic(20, {1.0}), spec), UsageError);
  EXPECT_THROW(default_algorithm("sice"), UsageError);
}

TEST(ExperimentSpecJson, Parse) {
  const ExperimentSpec s = parse_experiment_spec(R"({
    "dataset": "data.csv",
    "missingness": {"rate": 0.2, "mechanism": "mar", "mar_driver": "k1", "exclude": ["target"]},
    "algorithms": ["mean", {"name": "fcmi", "k": 2, "kl_weight": 0.5}, {"name": "knn", "k": 3}],
    "seeds": [1, 2]
  })",
                                                 "/base");
  EXPECT_EQ(s.dataset, std::filesystem::path("/base/data.csv"));
  EXPECT_DOUBLE_EQ(s.missingness.rate, 0.2);
  EXPECT_EQ(s.missingness.mechanism, Mechanism::MAR);
  EXPECT_EQ(*s.missingness.mar_driver, "k1");
  ASSERT_EQ(s.algorithms.size(), 3u);
  EXPECT_EQ(s.algorithms[1].fcmi.k, 2u);
  EXPECT_DOUBLE_EQ(s.algorithms[1].fcmi.kl_weight, 0.5);
  EXPECT_EQ(s.algorithms[2].knn.k, 3u);
  EXPECT_EQ(s.seeds, (std::vector<std::uint64_t>{1, 2}));
}

TEST(ExperimentSpecJson, Errors) {
  EXPECT_THROW(parse_experiment_spec("{not json", "."), UsageError);
  EXPECT_THROW(parse_experiment_spec(R"({"seeds": [1]})", "."), UsageError);
  EXPECT_THROW(parse_experiment_spec(R"({"dataset": "x", "algorithms": ["bogus"], "seeds": [1]})", "."), UsageError);
  EXPECT_THROW(load_experiment_spec("/nonexistent/spec.json"), IoError);
}

TEST(ExperimentSpecJson, EndToEndFromFile) {
  const auto dir = std::filesystem::temp_directory_path() / "fcmi_experiment_e2e";
  std::filesystem::create_directories(dir);
  write_csv(synthetic(80, {1.0, -1.0}), dir / "data.csv");
  std::ofstream(dir / "spec.json") << R"({"dataset": "data.csv", "algorithms": ["mean", "knn"], "seeds": [5]})";
  const ExperimentResult r = run_experiment(load_experiment_spec(dir / "spec.json"));
  EXPECT_EQ(r.runs.size(), 2u);
  std::ostringstream json;
  write_results_json(r, json);
  EXPECT_NE(json.str().find("\"aggregates\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace fcmi
