// Copyright 2026 The ADDM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "addm/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <string_view>

#include "addm/error.hpp"
#include "addm/rng.hpp"

namespace addm {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) return out;
    start = comma + 1;
  }
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

double LabeledDataset::outlier_rate() const {
  if (y.empty()) return 0.0;
  return static_cast<double>(std::count(y.begin(), y.end(), 1)) / static_cast<double>(y.size());
}

LabeledDataset parse_dataset(std::istream& in, std::string name) {
  LabeledDataset ds;
  ds.name = std::move(name);
  std::vector<double> values;
  std::size_t cols = 0, line_no = 0, rows = 0;
  bool first = true;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.starts_with("\xEF\xBB\xBF")) line.erase(0, 3);
    if (trim(line).empty()) continue;
    const auto fields = split_fields(line);
    if (first) {
      first = false;
      const bool header = std::any_of(fields.begin(), fields.end(),
                                      [](std::string_view f) { return !parse_number(f); });
      if (header) {
        cols = fields.size();
        continue;
      }
    }
    if (cols == 0) cols = fields.size();
    if (cols < 2) throw FormatError("line " + std::to_string(line_no) +
                                    ": need at least one feature column and a label column");
    if (fields.size() != cols)
      throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(cols) +
                        " columns, found " + std::to_string(fields.size()));
    for (std::size_t c = 0; c < cols; ++c) {
      const auto v = parse_number(fields[c]);
      if (!v || !std::isfinite(*v))
        throw FormatError("line " + std::to_string(line_no) + ", column " + std::to_string(c + 1) +
                          ": cannot parse '" + std::string(fields[c]) + "' as a finite number");
      if (c + 1 < cols) {
        values.push_back(*v);
      } else {
        if (*v != 0.0 && *v != 1.0)
          throw FormatError("line " + std::to_string(line_no) + ", column " +
                            std::to_string(c + 1) + ": label must be 0 or 1, found '" +
                            std::string(fields[c]) + "'");
        ds.y.push_back(static_cast<int>(*v));
      }
    }
    ++rows;
  }
  if (rows == 0) throw FormatError("dataset '" + ds.name + "' has no data rows");
  ds.X = Tensor(Shape{rows, cols - 1}, std::move(values));
  return ds;
}

LabeledDataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  return parse_dataset(in, std::filesystem::path(path).stem().string());
}

Scaler Scaler::fit(const Tensor& X) {
  if (X.rank() != 2 || X.rows() == 0) throw InvalidArgument("Scaler::fit: no rows");
  const std::size_t n = X.rows(), d = X.cols();
  Scaler s{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) s.mean[c] += X(r, c);
  for (double& m : s.mean) m /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < d; ++c) s.scale[c] += (X(r, c) - s.mean[c]) * (X(r, c) - s.mean[c]);
  for (std::size_t c = 0; c < d; ++c) {
    const double sd = std::sqrt(s.scale[c] / static_cast<double>(n));
    s.scale[c] = sd > 1e-12 * std::max(1.0, std::abs(s.mean[c])) ? sd : 1.0;
  }
  return s;
}

Tensor Scaler::transform(const Tensor& X) const {
  if (X.cols() != dim())
    throw ShapeError("Scaler::transform: expected " + std::to_string(dim()) + " columns, got " +
                     std::to_string(X.cols()));
  Tensor out = X;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] = (row[c] - mean[c]) / scale[c];
  }
  return out;
}

DataSplit split_and_standardize(const LabeledDataset& ds, double train_frac, std::uint64_t seed) {
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw InvalidArgument("split: train fraction must be in (0, 1)");
  std::vector<std::size_t> normals;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (ds.y[i] == 0) normals.push_back(i);
  if (normals.empty()) throw InvalidArgument("split: dataset '" + ds.name + "' has no normal rows");

  Rng rng(seed);
  std::shuffle(normals.begin(), normals.end(), rng);
  const auto n_train = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(normals.size()))), 1,
      normals.size());

  DataSplit split;
  split.train_rows.assign(normals.begin(), normals.begin() + static_cast<std::ptrdiff_t>(n_train));
  std::vector<bool> in_train(ds.size(), false);
  for (std::size_t i : split.train_rows) in_train[i] = true;
  for (std::size_t i = 0; i < ds.size(); ++i)
    if (!in_train[i]) {
      split.test_rows.push_back(i);
      split.test_labels.push_back(ds.y[i]);
    }

  const Tensor raw_train = ds.X.rows_subset(split.train_rows);
  split.scaler = Scaler::fit(raw_train);
  split.train = split.scaler.transform(raw_train);
  split.test = split.scaler.transform(ds.X.rows_subset(split.test_rows));
  return split;
}

}  // namespace addm
