#include "fcmi/fcmi.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>

#include <nlohmann/json.hpp>

#include "fcmi/error.hpp"

namespace fcmi {

namespace {

/// Target plus its predictors, with masked predictor cells set to the
/// predictor's observed mean.
Dataset mean_filled_view(const Dataset& work, const PredictorSelection& sel) {
  Dataset view;
  view.add_column(work.column(sel.target));
  for (const auto& name : sel.predictors) {
    Column c = work.column(name);
    if (c.missing_count() != 0) {
      auto v = c.numeric_values();
      double sum = 0.0;
      std::size_t n = 0;
      for (std::size_t i = 0; i < c.size(); ++i)
        if (!c.is_missing(i)) sum += v[i], ++n;
      const double mean = sum / static_cast<double>(n);
      for (std::size_t i = 0; i < c.size(); ++i)
        if (c.is_missing(i)) c.set(i, mean);
    }
    view.add_column(std::move(c));
  }
  return view;
}

double fallback_value(const Column& c, bool categorical) {
  const Dataset single({c});
  const ColumnStats stats = column_stats(single, c.name());
  if (categorical) return std::get<double>(*stats.mode);
  return *stats.mean;
}

}  // namespace

std::size_t FcmiResult::fallback_count() const {
  return static_cast<std::size_t>(
      std::count_if(columns.begin(), columns.end(), [](const auto& c) { return c.fallback.has_value(); }));
}

FcmiResult fcmi_impute(const Dataset& encoded, std::span<const EncodingMap> maps, const FcmiConfig& cfg) {
  cfg.validate();
  for (const auto& c : encoded.columns())
    if (!c.is_numeric()) throw UsageError("column '" + c.name() + "' must be label-encoded before FCMI");
  auto map_for = [&](const std::string& name) -> const EncodingMap* {
    for (const auto& m : maps)
      if (m.column() == name) return &m;
    return nullptr;
  };

  std::vector<std::size_t> order;
  for (std::size_t j = 0; j < encoded.n_cols(); ++j) {
    const Column& c = encoded.column(j);
    if (c.missing_count() == 0) continue;
    if (c.observed_count() == 0) throw FullyMissingColumn("column '" + c.name() + "' has no observed cells");
    order.push_back(j);
  }
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) {
    return encoded.column(a).missing_count() < encoded.column(b).missing_count();
  });

  FcmiResult result{encoded, {}};
  Dataset& work = result.data;
  for (auto col : order) {
    const std::string name = work.column(col).name();
    const EncodingMap* map = map_for(name);
    const ColumnKind kind = map ? ColumnKind::categorical(map->size()) : ColumnKind::numeric();

    std::vector<std::size_t> observed, missing;
    for (std::size_t i = 0; i < work.n_rows(); ++i)
      (work.column(col).is_missing(i) ? missing : observed).push_back(i);

    FcmiColumnReport report;
    report.column = name;
    report.imputed_cells = missing.size();
    try {
      const PredictorSelection sel = select_predictors(correlation_vector(work, name), cfg.k);
      const CorrelationDistribution p = to_distribution(sel.r_values);
      const Dataset view = mean_filled_view(work, sel);
      auto [model, training] = train_regressor(view.select_rows(observed), sel, p, kind, cfg);
      const auto predicted = predict_missing(model, view.select_rows(missing), sel);
      for (std::size_t i = 0; i < missing.size(); ++i) work.set(col, missing[i], predicted[i]);
      report.selection = sel;
      report.training = std::move(training);
    } catch (const NoPredictors& e) {
      report.fallback = e.what();
    } catch (const InsufficientData& e) {
      report.fallback = e.what();
    }
    if (report.fallback) {
      const double fill = fallback_value(work.column(col), map != nullptr);
      for (auto row : missing) work.set(col, row, fill);
    }
    result.columns.push_back(std::move(report));
  }
  return result;
}

FcmiResult fcmi_impute(const Dataset& d, const FcmiConfig& cfg) {
  EncodedDataset enc = encode_categoricals(d);
  FcmiResult result = fcmi_impute(enc.data, enc.maps, cfg);
  result.data = decode_categoricals(result.data, enc.maps);
  return result;
}

void write_trace_jsonl(const FcmiResult& result, std::ostream& out) {
  for (const auto& col : result.columns) {
    if (!col.training) continue;
    const auto& traj = col.training->trajectory;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      nlohmann::json line = {{"column", col.column},
                             {"iteration", i},
                             {"E", traj[i].data_term},
                             {"kl", traj[i].kl},
                             {"total", traj[i].total}};
      out << line.dump() << '\n';
    }
  }
}

}  // namespace fcmi
