#pragma once

#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fcmi/dataset.hpp"

namespace fcmi {

/// Bijection between the categories of one column and the codes 0..c-1,
/// assigned in lexicographic category order.
class EncodingMap {
 public:
  EncodingMap() = default;
  EncodingMap(std::string column, std::vector<std::string> sorted_categories);

  const std::string& column() const { return column_; }
  std::size_t size() const { return categories_.size(); }
  const std::vector<std::string>& categories() const { return categories_; }

  int code(std::string_view category) const;
  const std::string& category(int code) const;

 private:
  std::string column_;
  std::vector<std::string> categories_;
  std::map<std::string, int, std::less<>> codes_;
};

/// Replaces a categorical column by its numeric codes. Masked cells stay masked.
std::pair<Dataset, EncodingMap> label_encode(const Dataset& d, std::string_view column);

/// Inverse of label_encode. Codes are rounded to the nearest integer and
/// clamped into range before lookup.
Dataset label_decode(const Dataset& d, const EncodingMap& map);

/// Replaces a categorical column of cardinality c >= 2 by c indicator
/// columns named "<col>=<category>". A masked source cell masks the whole
/// indicator block for that row.
Dataset one_hot_encode(const Dataset& d, std::string_view column);

/// Label-encodes every categorical column.
struct EncodedDataset {
  Dataset data;
  std::vector<EncodingMap> maps;

  const EncodingMap* map_for(std::string_view column) const;
};

EncodedDataset encode_categoricals(const Dataset& d);
Dataset decode_categoricals(const Dataset& d, const std::vector<EncodingMap>& maps);

}  // namespace fcmi
