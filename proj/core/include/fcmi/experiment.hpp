#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fcmi/baselines.hpp"
#include "fcmi/csv.hpp"
#include "fcmi/dataset.hpp"
#include "fcmi/missingness.hpp"
#include "fcmi/regressor.hpp"

namespace fcmi {

/// One imputation algorithm with its settings. `name` is one of
/// "fcmi", "knn", "mean", "mice-lite".
struct AlgorithmSpec {
  std::string name;
  FcmiConfig fcmi;
  KnnConfig knn;
  IterativeConfig iterative;
};

const std::vector<std::string>& algorithm_names();
AlgorithmSpec default_algorithm(const std::string& name);

/// Runs one algorithm on a dataset with masked cells. Mixed
/// numeric/categorical input is fine for all four.
ImputeOutcome impute(const Dataset& d, const AlgorithmSpec& algorithm);

struct ExperimentSpec {
  std::filesystem::path dataset;
  CsvOptions csv;
  MissingnessSpec missingness;  // seed is replaced per run
  std::vector<AlgorithmSpec> algorithms;
  std::vector<std::uint64_t> seeds;

  void validate() const;
};

/// Scores of one (algorithm, seed) run. RMSE covers numeric ground-truth
/// cells, accuracy the categorical ones; either is empty when no such cell
/// was injected.
struct RunScore {
  std::string algorithm;
  std::uint64_t seed = 0;
  std::optional<double> rmse;
  std::optional<double> accuracy;
  /// 100 * (1 - rmse / rmse of mean imputation), clipped to [0, 100].
  std::optional<double> normalized_score;
  std::size_t numeric_cells = 0;
  std::size_t categorical_cells = 0;
  std::vector<std::string> flags;
};

struct MetricAggregate {
  std::string algorithm;
  std::string metric;
  std::size_t runs = 0;
  double mean = 0.0;
  std::optional<double> stddev;  // sample standard deviation, needs >= 2 runs
};

struct ExperimentResult {
  std::vector<RunScore> runs;  // seed-major, algorithms in spec order
  std::vector<MetricAggregate> aggregates;
};

/// Scores an imputed dataset against the injected ground truth.
RunScore score_imputation(const Dataset& imputed, const GroundTruthCells& truth);

/// inject -> impute with every algorithm -> score, once per seed.
ExperimentResult run_experiment(const Dataset& complete, const ExperimentSpec& spec);
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Parses a JSON experiment description. Relative dataset paths resolve
/// against `base_dir`. Throws UsageError on malformed content.
ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::filesystem::path& base_dir);
/// Throws IoError when the file is absent.
ExperimentSpec load_experiment_spec(const std::filesystem::path& path);

/// Flat CSV: algorithm,seed,metric,value,normalized_score.
void write_results_csv(const ExperimentResult& result, std::ostream& out);
void write_results_json(const ExperimentResult& result, std::ostream& out);

}  // namespace fcmi
