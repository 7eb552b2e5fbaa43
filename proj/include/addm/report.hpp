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

#include <nlohmann/json.hpp>
#include <ostream>

#include "addm/experiment.hpp"

namespace addm {

/// Configuration echo; the `lr` key holds the effective learning rate.
nlohmann::json config_to_json(const ExperimentConfig& config);
ExperimentConfig config_from_json(const nlohmann::json& j);

struct ReportOptions {
  bool per_sample = true;  ///< include scores, labels and predictions
  bool timing = false;     ///< include wall-clock seconds
};

/// One report object; `kind` fills the "record" key.
nlohmann::json report_to_json(const EvaluationReport& report, const std::string& kind,
                              const ReportOptions& options);

/// Write `record` as a single line.
void write_record(std::ostream& out, const nlohmann::json& record);

}  // namespace addm
