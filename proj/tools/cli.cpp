#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fcmi/correlation.hpp"
#include "fcmi/csv.hpp"
#include "fcmi/error.hpp"
#include "fcmi/experiment.hpp"
#include "fcmi/fcmi.hpp"
#include "fcmi/missingness.hpp"

namespace fcmi::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string in, out, truth, config, trace, target;
  std::vector<std::string> algos;
  std::vector<std::string> exclude;
  std::string mechanism = "mcar";
  std::string mar_driver;
  double rate = 0.10;
  std::uint64_t seed = 0;
  std::optional<std::size_t> k;
  std::optional<double> lr;
  std::optional<std::size_t> max_iters;
  std::optional<double> kl_weight;
};

constexpr std::size_t kBenchmarkSeeds = 5;

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw UsageError(std::string(flag) + " is required");
}

void require_input(const std::string& path, const char* flag) {
  require(path, flag);
  if (!fs::is_regular_file(path)) throw UsageError(std::string(flag) + ": no such file '" + path + "'");
}

/// Output paths must not alias any input of the same command.
void check_outputs(std::initializer_list<const std::string*> inputs, std::initializer_list<const std::string*> outputs) {
  for (const auto* o : outputs) {
    if (o->empty() || !fs::exists(*o)) continue;
    for (const auto* i : inputs)
      if (!i->empty() && fs::exists(*i) && fs::equivalent(*i, *o))
        throw UsageError("refusing to overwrite input file '" + *i + "'");
  }
}

std::ofstream open_output(const std::string& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

MissingnessSpec missingness_from(const Options& o) {
  MissingnessSpec spec;
  spec.rate = o.rate;
  spec.mechanism = parse_mechanism(o.mechanism);
  spec.excluded_columns = o.exclude;
  spec.seed = o.seed;
  if (!o.mar_driver.empty()) spec.mar_driver = o.mar_driver;
  return spec;
}

AlgorithmSpec algorithm_from(const std::string& name, const Options& o) {
  AlgorithmSpec a = default_algorithm(name);
  a.fcmi.seed = o.seed;
  if (name == "fcmi") {
    if (o.k) a.fcmi.k = *o.k;
    if (o.lr) a.fcmi.learning_rate = *o.lr;
    if (o.max_iters) a.fcmi.max_iters = *o.max_iters;
    if (o.kl_weight) a.fcmi.kl_weight = *o.kl_weight;
  } else if (name == "knn") {
    if (o.k) a.knn.k = *o.k;
  }
  return a;
}

int run_inject(const Options& o, std::ostream& out) {
  require_input(o.in, "--in");
  require(o.out, "--out");
  require(o.truth, "--truth");
  check_outputs({&o.in}, {&o.out, &o.truth});
  const Dataset d = read_csv(o.in);
  const auto [injected, truth] = inject_missing(d, missingness_from(o));
  write_csv(injected, o.out);
  write_truth_csv(truth, o.truth);
  out << "masked " << truth.size() << " cells in " << d.n_rows() << " rows\n";
  return kExitOk;
}

int run_impute(const Options& o, std::ostream& out, std::ostream& err) {
  require_input(o.in, "--in");
  require(o.out, "--out");
  check_outputs({&o.in}, {&o.out, &o.trace});
  const std::string name = o.algos.empty() ? "fcmi" : o.algos.front();
  if (o.algos.size() > 1) throw UsageError("impute takes a single --algo");
  const AlgorithmSpec algo = algorithm_from(name, o);
  const Dataset d = read_csv(o.in);

  Dataset imputed;
  if (name == "fcmi") {
    const FcmiResult r = fcmi_impute(d, algo.fcmi);
    for (const auto& c : r.columns) {
      err << "fcmi: " << c.column << " (" << c.imputed_cells << " cells)";
      if (c.fallback) {
        err << " mean/mode fallback: " << *c.fallback;
      } else {
        err << " <-";
        for (const auto& p : c.selection->predictors) err << ' ' << p;
        err << ", " << c.training->iterations << " iterations";
      }
      err << '\n';
    }
    if (!o.trace.empty()) {
      auto f = open_output(o.trace);
      write_trace_jsonl(r, f);
    }
    imputed = r.data;
  } else {
    if (!o.trace.empty()) throw UsageError("--trace applies to --algo fcmi only");
    ImputeOutcome r = impute(d, algo);
    for (const auto& f : r.flags) err << f << '\n';
    imputed = std::move(r.data);
  }
  write_csv(imputed, o.out);
  out << "imputed " << d.missing_count() << " cells with " << name << '\n';
  return kExitOk;
}

int run_corr(const Options& o, std::ostream& out) {
  require_input(o.in, "--in");
  require(o.target, "--target");
  check_outputs({&o.in}, {&o.out});
  const EncodedDataset enc = encode_categoricals(read_csv(o.in));
  const CorrelationVector cv = correlation_vector(enc.data, o.target);
  std::ostringstream report;
  write_correlation_csv(cv, report);
  if (o.out.empty()) {
    out << report.str();
  } else {
    auto f = open_output(o.out);
    f << report.str();
  }
  if (o.k) {
    const auto sel = select_predictors(cv, *o.k);
    out << "top-" << *o.k << " predictors for " << o.target << ":";
    for (const auto& p : sel.predictors) out << ' ' << p;
    out << '\n';
  }
  return kExitOk;
}

int run_evaluate(const Options& o, std::ostream& out) {
  if (!o.config.empty()) {
    if (!fs::is_regular_file(o.config)) throw UsageError("--config: no such file '" + o.config + "'");
    check_outputs({&o.config}, {&o.out});
    const ExperimentSpec spec = load_experiment_spec(o.config);
    const ExperimentResult result = run_experiment(spec);
    std::ostringstream json;
    write_results_json(result, json);
    if (o.out.empty()) {
      out << json.str();
    } else {
      auto f = open_output(o.out);
      f << json.str();
    }
    return kExitOk;
  }

  require_input(o.in, "--in");
  require_input(o.truth, "--truth");
  check_outputs({&o.in, &o.truth}, {&o.out});
  const Dataset imputed = read_csv(o.in);
  const GroundTruthCells truth = read_truth_csv(o.truth, imputed);
  if (imputed.missing_count() != 0) throw DataError("--in still has masked cells; impute it first");
  const RunScore score = score_imputation(imputed, truth);

  nlohmann::json j = {{"scored_numeric", score.numeric_cells}, {"scored_categorical", score.categorical_cells}};
  j["rmse"] = score.rmse ? nlohmann::json(*score.rmse) : nlohmann::json(nullptr);
  j["accuracy"] = score.accuracy ? nlohmann::json(*score.accuracy) : nlohmann::json(nullptr);
  if (o.out.empty()) {
    out << j.dump(2) << '\n';
  } else {
    auto f = open_output(o.out);
    f << j.dump(2) << '\n';
  }
  return kExitOk;
}

int run_benchmark(const Options& o, std::ostream& out) {
  ExperimentSpec spec;
  if (!o.config.empty()) {
    if (!fs::is_regular_file(o.config)) throw UsageError("--config: no such file '" + o.config + "'");
    spec = load_experiment_spec(o.config);
    if (!o.in.empty()) spec.dataset = o.in;
  } else {
    require_input(o.in, "--in");
    spec.dataset = o.in;
    spec.missingness = missingness_from(o);
    const auto& names = o.algos.empty() ? algorithm_names() : o.algos;
    for (const auto& n : names) spec.algorithms.push_back(algorithm_from(n, o));
    for (std::size_t i = 0; i < kBenchmarkSeeds; ++i) spec.seeds.push_back(o.seed + i);
  }
  require(o.out, "--out");
  const std::string dataset = spec.dataset.string();
  check_outputs({&dataset, &o.config}, {&o.out});
  if (!fs::is_regular_file(spec.dataset)) throw UsageError("dataset '" + dataset + "' does not exist");

  const ExperimentResult result = run_experiment(spec);
  {
    auto f = open_output(o.out);
    write_results_csv(result, f);
  }
  for (const auto& a : result.aggregates) {
    out << a.algorithm << ' ' << a.metric << " mean=" << a.mean;
    if (a.stddev) out << " sd=" << *a.stddev;
    out << " (" << a.runs << " runs)\n";
  }
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Correlation-guided missing-data imputation", "fcmi"};
  app.require_subcommand(1);
  Options o;

  auto* inject = app.add_subcommand("inject", "Mask a fraction of cells and record the ground truth");
  inject->add_option("--in", o.in, "Fully observed input CSV");
  inject->add_option("--out", o.out, "Output CSV with masked cells");
  inject->add_option("--truth", o.truth, "Ground-truth CSV (row,column,value)");
  inject->add_option("--rate", o.rate, "Fraction of rows receiving one masked cell")->check(CLI::Range(0.0, 1.0));
  inject->add_option("--mechanism", o.mechanism, "mcar or mar")->check(CLI::IsMember({"mcar", "mar"}));
  inject->add_option("--mar-driver", o.mar_driver, "Column whose rank drives MAR row selection");
  inject->add_option("--exclude", o.exclude, "Columns never masked")->delimiter(',');
  inject->add_option("--seed", o.seed, "Random seed");

  auto* impute_cmd = app.add_subcommand("impute", "Fill masked cells");
  impute_cmd->add_option("--in", o.in, "Input CSV with missing cells");
  impute_cmd->add_option("--out", o.out, "Imputed CSV");
  impute_cmd->add_option("--algo", o.algos, "fcmi, knn, mean or mice-lite")
      ->check(CLI::IsMember(algorithm_names()));
  impute_cmd->add_option("--seed", o.seed, "Random seed");
  impute_cmd->add_option("--k", o.k, "Predictors per column (fcmi) or neighbours (knn)")->check(CLI::PositiveNumber);
  impute_cmd->add_option("--lr", o.lr, "FCMI learning rate")->check(CLI::PositiveNumber);
  impute_cmd->add_option("--max-iters", o.max_iters, "FCMI iteration budget")->check(CLI::PositiveNumber);
  impute_cmd->add_option("--kl-weight", o.kl_weight, "Weight of the correlation term")->check(CLI::NonNegativeNumber);
  impute_cmd->add_option("--trace", o.trace, "Write the FCMI loss trajectory as JSON lines");

  auto* corr = app.add_subcommand("corr", "Correlation report for one column");
  corr->add_option("--in", o.in, "Input CSV");
  corr->add_option("--target", o.target, "Column to correlate against");
  corr->add_option("--k", o.k, "Also print the top-K predictors")->check(CLI::PositiveNumber);
  corr->add_option("--out", o.out, "Report CSV (column,r); stdout when omitted");

  auto* evaluate = app.add_subcommand("evaluate", "Score an imputation, or run an experiment config");
  evaluate->add_option("--in", o.in, "Imputed CSV");
  evaluate->add_option("--truth", o.truth, "Ground-truth CSV from inject");
  evaluate->add_option("--config", o.config, "JSON experiment description");
  evaluate->add_option("--out", o.out, "JSON output; stdout when omitted");

  auto* bench = app.add_subcommand("benchmark", "Inject, impute with every algorithm, and score over seeds");
  bench->add_option("--in", o.in, "Fully observed input CSV");
  bench->add_option("--config", o.config, "JSON experiment description");
  bench->add_option("--out", o.out, "Results CSV (algorithm,seed,metric,value,normalized_score)");
  bench->add_option("--algo", o.algos, "Algorithms to run (repeatable; default all)")
      ->check(CLI::IsMember(algorithm_names()));
  bench->add_option("--rate", o.rate, "Missingness rate")->check(CLI::Range(0.0, 1.0));
  bench->add_option("--mechanism", o.mechanism, "mcar or mar")->check(CLI::IsMember({"mcar", "mar"}));
  bench->add_option("--mar-driver", o.mar_driver, "MAR driver column");
  bench->add_option("--exclude", o.exclude, "Columns never masked")->delimiter(',');
  bench->add_option("--seed", o.seed, "Base seed; runs use seed .. seed+4");
  bench->add_option("--k", o.k, "FCMI predictors / KNN neighbours")->check(CLI::PositiveNumber);
  bench->add_option("--lr", o.lr, "FCMI learning rate")->check(CLI::PositiveNumber);
  bench->add_option("--max-iters", o.max_iters, "FCMI iteration budget")->check(CLI::PositiveNumber);
  bench->add_option("--kl-weight", o.kl_weight, "Weight of the correlation term")->check(CLI::NonNegativeNumber);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "fcmi: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (inject->parsed()) return run_inject(o, out);
    if (impute_cmd->parsed()) return run_impute(o, out, err);
    if (corr->parsed()) return run_corr(o, out);
    if (evaluate->parsed()) return run_evaluate(o, out);
    if (bench->parsed()) return run_benchmark(o, out);
  } catch (const UsageError& e) {
    err << "fcmi: " << e.what() << '\n';
    return kExitUsage;
  } catch (const IoError& e) {
    err << "fcmi: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "fcmi: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

}  // namespace fcmi::cli
