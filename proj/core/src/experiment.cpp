#include "fcmi/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fcmi/error.hpp"
#include "fcmi/fcmi.hpp"
#include "fcmi/metrics.hpp"

namespace fcmi {

double rmse(std::span<const double> y_true, std::span<const double> y_pred) {
  if (y_true.size() != y_pred.size()) throw UsageError("rmse: length mismatch");
  if (y_true.empty()) throw UsageError("rmse: empty input");
  double ss = 0.0;
  for (std::size_t i = 0; i < y_true.size(); ++i) ss += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  return std::sqrt(ss / static_cast<double>(y_true.size()));
}

const std::vector<std::string>& algorithm_names() {
  static const std::vector<std::string> names{"fcmi", "knn", "mean", "mice-lite"};
  return names;
}

AlgorithmSpec default_algorithm(const std::string& name) {
  const auto& names = algorithm_names();
  if (std::find(names.begin(), names.end(), name) == names.end())
    throw UsageError("unknown algorithm '" + name + "' (expected fcmi, knn, mean or mice-lite)");
  AlgorithmSpec a;
  a.name = name;
  return a;
}

ImputeOutcome impute(const Dataset& d, const AlgorithmSpec& algorithm) {
  if (algorithm.name == "mean") return {mean_mode_impute(d), {}};
  if (algorithm.name == "knn") return knn_impute(d, algorithm.knn);
  if (algorithm.name == "mice-lite") return iterative_impute(d, algorithm.iterative);
  if (algorithm.name == "fcmi") {
    FcmiResult r = fcmi_impute(d, algorithm.fcmi);
    ImputeOutcome out{std::move(r.data), {}};
    for (const auto& c : r.columns)
      if (c.fallback) out.flags.push_back("fcmi: '" + c.column + "' used mean/mode (" + *c.fallback + ")");
    return out;
  }
  throw UsageError("unknown algorithm '" + algorithm.name + "'");
}

void ExperimentSpec::validate() const {
  if (algorithms.empty()) throw UsageError("experiment needs at least one algorithm");
  if (seeds.empty()) throw UsageError("experiment needs at least one seed");
  for (const auto& a : algorithms) {
    default_algorithm(a.name);
    if (a.name == "fcmi") a.fcmi.validate();
    if (a.name == "knn" && a.knn.k == 0) throw UsageError("knn k must be at least 1");
    if (a.name == "mice-lite" && a.iterative.sweeps == 0) throw UsageError("mice-lite needs at least one sweep");
  }
  injected_cell_count(missingness.rate, 0);
}

RunScore score_imputation(const Dataset& imputed, const GroundTruthCells& truth) {
  RunScore score;
  std::vector<double> num_true, num_pred;
  std::vector<std::string> cat_true, cat_pred;
  for (const auto& t : truth) {
    const Column& c = imputed.column(t.column);
    const Cell got = c.cell(t.row);
    if (const auto* v = std::get_if<double>(&t.value)) {
      num_true.push_back(*v);
      num_pred.push_back(std::get<double>(got));
    } else {
      cat_true.push_back(std::get<std::string>(t.value));
      cat_pred.push_back(std::get<std::string>(got));
    }
  }
  score.numeric_cells = num_true.size();
  score.categorical_cells = cat_true.size();
  if (!num_true.empty()) score.rmse = rmse(num_true, num_pred);
  if (!cat_true.empty()) score.accuracy = accuracy<std::string>(cat_true, cat_pred);
  return score;
}

namespace {

void add_aggregate(ExperimentResult& result, const std::string& algorithm, const std::string& metric,
                   const std::vector<double>& values) {
  if (values.empty()) return;
  MetricAggregate agg{algorithm, metric, values.size(), 0.0, std::nullopt};
  for (double v : values) agg.mean += v;
  agg.mean /= static_cast<double>(values.size());
  if (values.size() >= 2) {
    double ss = 0.0;
    for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
    agg.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  result.aggregates.push_back(std::move(agg));
}

}  // namespace

ExperimentResult run_experiment(const Dataset& complete, const ExperimentSpec& spec) {
  spec.validate();
  if (!complete.complete()) throw UsageError("experiment dataset must be fully observed");

  ExperimentResult result;
  for (auto seed : spec.seeds) {
    MissingnessSpec ms = spec.missingness;
    ms.seed = seed;
    const auto [injected, truth] = inject_missing(complete, ms);

    std::optional<double> baseline_rmse;
    if (!truth.empty()) baseline_rmse = score_imputation(mean_mode_impute(injected), truth).rmse;

    for (const auto& algorithm : spec.algorithms) {
      ImputeOutcome outcome;
      try {
        outcome = impute(injected, algorithm);
      } catch (const DataError& e) {
        outcome = {mean_mode_impute(injected), {algorithm.name + " failed, scored mean/mode instead: " + e.what()}};
      }
      RunScore score = score_imputation(outcome.data, truth);
      score.algorithm = algorithm.name;
      score.seed = seed;
      score.flags = std::move(outcome.flags);
      if (score.rmse && baseline_rmse && *baseline_rmse > 0.0)
        score.normalized_score = std::clamp(100.0 * (1.0 - *score.rmse / *baseline_rmse), 0.0, 100.0);
      result.runs.push_back(std::move(score));
    }
  }

  for (const auto& algorithm : spec.algorithms) {
    std::vector<double> rmses, accs, norms;
    for (const auto& r : result.runs) {
      if (r.algorithm != algorithm.name) continue;
      if (r.rmse) rmses.push_back(*r.rmse);
      if (r.accuracy) accs.push_back(*r.accuracy);
      if (r.normalized_score) norms.push_back(*r.normalized_score);
    }
    add_aggregate(result, algorithm.name, "rmse", rmses);
    add_aggregate(result, algorithm.name, "accuracy", accs);
    add_aggregate(result, algorithm.name, "normalized_score", norms);
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  return run_experiment(read_csv(spec.dataset, spec.csv), spec);
}

// ---------------------------------------------------------------------------
// JSON / CSV

namespace {

using nlohmann::json;

template <typename T>
void read_field(const json& obj, const char* key, T& out) {
  if (auto it = obj.find(key); it != obj.end()) out = it->get<T>();
}

AlgorithmSpec parse_algorithm(const json& j) {
  if (j.is_string()) return default_algorithm(j.get<std::string>());
  if (!j.is_object() || !j.contains("name")) throw UsageError("algorithm entries must be a name or an object with \"name\"");
  AlgorithmSpec a = default_algorithm(j.at("name").get<std::string>());
  if (a.name == "fcmi") {
    read_field(j, "k", a.fcmi.k);
    read_field(j, "learning_rate", a.fcmi.learning_rate);
    read_field(j, "max_iters", a.fcmi.max_iters);
    read_field(j, "tol", a.fcmi.tol);
    read_field(j, "kl_weight", a.fcmi.kl_weight);
  } else if (a.name == "knn") {
    read_field(j, "k", a.knn.k);
  } else if (a.name == "mice-lite") {
    read_field(j, "sweeps", a.iterative.sweeps);
    read_field(j, "tol", a.iterative.tol);
  }
  return a;
}

std::string format_number(double v) { return to_string(Cell{v}); }

}  // namespace

ExperimentSpec parse_experiment_spec(const std::string& json_text, const std::filesystem::path& base_dir) {
  ExperimentSpec spec;
  try {
    const json j = json::parse(json_text);
    if (!j.is_object()) throw UsageError("experiment config must be a JSON object");
    std::filesystem::path dataset = j.at("dataset").get<std::string>();
    spec.dataset = dataset.is_absolute() ? dataset : base_dir / dataset;
    if (j.contains("missing_tokens")) {
      spec.csv.missing_tokens.clear();
      for (const auto& t : j.at("missing_tokens")) spec.csv.missing_tokens.insert(t.get<std::string>());
    }
    if (j.contains("missingness")) {
      const json& m = j.at("missingness");
      read_field(m, "rate", spec.missingness.rate);
      if (m.contains("mechanism")) spec.missingness.mechanism = parse_mechanism(m.at("mechanism").get<std::string>());
      read_field(m, "exclude", spec.missingness.excluded_columns);
      if (m.contains("mar_driver") && !m.at("mar_driver").is_null())
        spec.missingness.mar_driver = m.at("mar_driver").get<std::string>();
    }
    if (j.contains("algorithms")) {
      for (const auto& a : j.at("algorithms")) spec.algorithms.push_back(parse_algorithm(a));
    } else {
      for (const auto& name : algorithm_names()) spec.algorithms.push_back(default_algorithm(name));
    }
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  } catch (const json::exception& e) {
    throw UsageError(std::string("malformed experiment config: ") + e.what());
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open experiment config '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_spec(buf.str(), path.parent_path());
}

void write_results_csv(const ExperimentResult& result, std::ostream& out) {
  out << "algorithm,seed,metric,value,normalized_score\n";
  for (const auto& r : result.runs) {
    const std::string prefix = csv_escape(r.algorithm) + ',' + std::to_string(r.seed) + ',';
    if (r.rmse) {
      out << prefix << "rmse," << format_number(*r.rmse) << ',';
      if (r.normalized_score) out << format_number(*r.normalized_score);
      out << '\n';
    }
    if (r.accuracy) out << prefix << "accuracy," << format_number(*r.accuracy) << ",\n";
    out << prefix << "scored_numeric," << r.numeric_cells << ",\n";
    out << prefix << "scored_categorical," << r.categorical_cells << ",\n";
    out << prefix << "fallbacks," << r.flags.size() << ",\n";
  }
}

void write_results_json(const ExperimentResult& result, std::ostream& out) {
  json runs = json::array();
  for (const auto& r : result.runs) {
    json run = {{"algorithm", r.algorithm},
                {"seed", r.seed},
                {"scored_numeric", r.numeric_cells},
                {"scored_categorical", r.categorical_cells},
                {"flags", r.flags}};
    run["rmse"] = r.rmse ? json(*r.rmse) : json(nullptr);
    run["accuracy"] = r.accuracy ? json(*r.accuracy) : json(nullptr);
    run["normalized_score"] = r.normalized_score ? json(*r.normalized_score) : json(nullptr);
    runs.push_back(std::move(run));
  }
  json aggregates = json::array();
  for (const auto& a : result.aggregates) {
    aggregates.push_back({{"algorithm", a.algorithm},
                          {"metric", a.metric},
                          {"runs", a.runs},
                          {"mean", a.mean},
                          {"stddev", a.stddev ? json(*a.stddev) : json(nullptr)}});
  }
  out << json{{"runs", runs}, {"aggregates", aggregates}}.dump(2) << '\n';
}

}  // namespace fcmi
