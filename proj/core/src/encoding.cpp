#include "fcmi/encoding.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "fcmi/error.hpp"

namespace fcmi {

EncodingMap::EncodingMap(std::string column, std::vector<std::string> sorted_categories)
    : column_(std::move(column)), categories_(std::move(sorted_categories)) {
  for (std::size_t i = 0; i < categories_.size(); ++i) {
    if (i && !(categories_[i - 1] < categories_[i]))
      throw UsageError("encoding categories must be strictly increasing");
    codes_.emplace(categories_[i], static_cast<int>(i));
  }
}

int EncodingMap::code(std::string_view category) const {
  auto it = codes_.find(category);
  if (it == codes_.end())
    throw UsageError("category '" + std::string(category) + "' unknown to encoding of '" + column_ + "'");
  return it->second;
}

const std::string& EncodingMap::category(int code) const {
  if (code < 0 || static_cast<std::size_t>(code) >= categories_.size())
    throw UsageError("code " + std::to_string(code) + " out of range for '" + column_ + "'");
  return categories_[static_cast<std::size_t>(code)];
}

namespace {

const Column& require_categorical(const Dataset& d, std::string_view column) {
  const Column& c = d.column(column);
  if (!c.is_categorical()) throw UsageError("column '" + std::string(column) + "' is not categorical");
  return c;
}

std::vector<std::string> observed_categories(const Column& c) {
  std::set<std::string> distinct;
  auto values = c.categorical_values();
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!c.is_missing(i)) distinct.insert(values[i]);
  return {distinct.begin(), distinct.end()};
}

}  // namespace

std::pair<Dataset, EncodingMap> label_encode(const Dataset& d, std::string_view column) {
  const Column& src = require_categorical(d, column);
  EncodingMap map(src.name(), observed_categories(src));

  auto values = src.categorical_values();
  std::vector<double> codes(src.size(), 0.0);
  for (std::size_t i = 0; i < src.size(); ++i)
    if (!src.is_missing(i)) codes[i] = map.code(values[i]);

  Dataset out = d;
  out.replace_column(d.index_of(column),
                     Column(src.name(), std::move(codes), MissingMask(src.missing().begin(), src.missing().end())));
  return {std::move(out), std::move(map)};
}

Dataset label_decode(const Dataset& d, const EncodingMap& map) {
  const Column& src = d.column(map.column());
  if (!src.is_numeric()) throw UsageError("column '" + map.column() + "' is not label-encoded");
  if (map.size() == 0 && src.observed_count() > 0)
    throw UsageError("empty encoding for observed column '" + map.column() + "'");

  auto codes = src.numeric_values();
  std::vector<std::string> labels(src.size());
  const long hi = static_cast<long>(map.size()) - 1;
  for (std::size_t i = 0; i < src.size(); ++i) {
    if (src.is_missing(i)) continue;
    const long code = std::clamp(std::lround(codes[i]), 0L, hi);
    labels[i] = map.category(static_cast<int>(code));
  }
  Dataset out = d;
  out.replace_column(d.index_of(map.column()),
                     Column(src.name(), std::move(labels), MissingMask(src.missing().begin(), src.missing().end())));
  return out;
}

Dataset one_hot_encode(const Dataset& d, std::string_view column) {
  const Column& src = require_categorical(d, column);
  const auto categories = observed_categories(src);
  if (categories.size() < 2)
    throw UsageError("one-hot encoding of '" + std::string(column) + "' needs at least 2 categories, found " +
                     std::to_string(categories.size()));

  auto values = src.categorical_values();
  MissingMask mask(src.missing().begin(), src.missing().end());
  std::vector<Column> indicators;
  indicators.reserve(categories.size());
  for (const auto& cat : categories) {
    std::vector<double> ind(src.size(), 0.0);
    for (std::size_t i = 0; i < src.size(); ++i)
      if (!src.is_missing(i) && values[i] == cat) ind[i] = 1.0;
    indicators.emplace_back(src.name() + "=" + cat, std::move(ind), mask);
  }
  Dataset out = d;
  out.splice_column(d.index_of(column), std::move(indicators));
  return out;
}

const EncodingMap* EncodedDataset::map_for(std::string_view column) const {
  for (const auto& m : maps)
    if (m.column() == column) return &m;
  return nullptr;
}

EncodedDataset encode_categoricals(const Dataset& d) {
  EncodedDataset out{d, {}};
  for (const auto& c : d.columns()) {
    if (!c.is_categorical()) continue;
    auto [encoded, map] = label_encode(out.data, c.name());
    out.data = std::move(encoded);
    out.maps.push_back(std::move(map));
  }
  return out;
}

Dataset decode_categoricals(const Dataset& d, const std::vector<EncodingMap>& maps) {
  Dataset out = d;
  for (const auto& m : maps) out = label_decode(out, m);
  return out;
}

}  // namespace fcmi
