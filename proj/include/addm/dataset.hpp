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

#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <string>
#include <vector>

#include "addm/tensor.hpp"

namespace addm {

struct LabeledDataset {
  Tensor X;            ///< N x d
  std::vector<int> y;  ///< 1 = anomaly
  std::string name;

  std::size_t size() const noexcept { return y.size(); }
  std::size_t dim() const noexcept { return X.cols(); }
  double outlier_rate() const;
};

/// Comma-separated rows of d features followed by a 0/1 label. A first row
/// with any non-numeric field is a header and is skipped. Blank lines are
/// ignored. Errors name the 1-based line and column.
LabeledDataset parse_dataset(std::istream& in, std::string name);

/// parse_dataset on a file; the name is the file stem.
LabeledDataset load_dataset(const std::string& path);

/// Per-column affine map fitted on training rows: (x - mean) / scale, where
/// scale is the population standard deviation, or 1 for constant columns.
struct Scaler {
  std::vector<double> mean;
  std::vector<double> scale;

  static Scaler fit(const Tensor& X);
  Tensor transform(const Tensor& X) const;
  std::size_t dim() const noexcept { return mean.size(); }
};

struct DataSplit {
  Tensor train;                   ///< standardized normal rows
  Tensor test;                    ///< standardized held-out normals and all anomalies
  std::vector<int> test_labels;
  Scaler scaler;
  std::vector<std::size_t> train_rows;  ///< source row indices
  std::vector<std::size_t> test_rows;
};

/// Train on round(train_frac * normals) shuffled normal rows (at least one);
/// the test part keeps source order.
DataSplit split_and_standardize(const LabeledDataset& ds, double train_frac, std::uint64_t seed);

}  // namespace addm
