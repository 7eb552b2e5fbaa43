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

#include <cstdint>
#include <string>
#include <vector>

#include "addm/experiment.hpp"

namespace addm {

inline constexpr char kModelMagic[8] = {'A', 'D', 'D', 'M', 'M', 'O', 'D', 'L'};
inline constexpr std::uint32_t kModelVersion = 1;

/// Serialize to bytes. Layout (all integers and reals little-endian):
///
///   magic "ADDMMODL" | u32 version | sections... | u32 crc32 of all prior bytes
///
/// Every section is `u32 id | u64 byte length | payload`, in this order:
///   1 method      u8 method tag
///   2 scaler      vec mean, vec scale
///   3 W           mat frequencies (D x d, 0 x 0 when unused)
///   4 b           vec phases
///   5 V           mat eigenvectors (r x D)
///   6 lambda      f64 normalization, vec eigenvalues
///   7 autoencoder u64 encoder count, u64 decoder count, then per layer
///                 u8 activation, mat weights, vec bias
///   8 reference   mat standardized training rows (kde only)
///   9 tau         f64 tau, f64 outlier rate
///  10 metadata    UTF-8 JSON object with the configuration
///
/// vec = u64 n, n x f64. mat = u64 rows, u64 cols, rows*cols x f64 row-major.
std::vector<std::uint8_t> serialize_model(const TrainedModel& model);

/// Inverse of serialize_model. Throws FormatError on a bad magic, version,
/// checksum, section order or size; nothing is returned on failure.
TrainedModel deserialize_model(const std::vector<std::uint8_t>& bytes);

/// Writes through a temporary file and renames it into place.
void save_model(const std::string& path, const TrainedModel& model);
TrainedModel load_model(const std::string& path);

}  // namespace addm
