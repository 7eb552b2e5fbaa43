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

#include "addm/report.hpp"

#include "addm/error.hpp"

namespace addm {

nlohmann::json config_to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["method"] = method_name(c.method);
  j["gamma"] = c.gamma;
  j["features"] = c.features;
  j["rank"] = c.rank;
  j["alpha"] = c.alpha;
  j["encoder"] = c.encoder_sizes;
  j["epochs"] = c.epochs;
  j["lr"] = c.effective_lr();
  j["batch_size"] = c.batch_size;
  j["aff_epochs"] = c.aff_epochs;
  j["aff_pairs"] = c.aff_pairs;
  j["aff_lr"] = c.aff_lr;
  j["warmup_epochs"] = c.warmup_epochs;
  j["aff_input"] = aff_input_name(c.aff_input);
  j["seed"] = c.seed;
  j["outlier_rate"] = c.outlier_rate ? nlohmann::json(*c.outlier_rate) : nlohmann::json(nullptr);
  j["train_frac"] = c.train_frac;
  j["calibrate_on_train"] = c.calibrate_on_train;
  return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig c;
  c.method = parse_method(j.at("method").get<std::string>());
  c.gamma = j.at("gamma").get<double>();
  c.features = j.at("features").get<std::size_t>();
  c.rank = j.at("rank").get<std::size_t>();
  c.alpha = j.at("alpha").get<double>();
  c.encoder_sizes = j.at("encoder").get<std::vector<std::size_t>>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.lr = j.at("lr").get<double>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.aff_epochs = j.at("aff_epochs").get<std::size_t>();
  c.aff_pairs = j.at("aff_pairs").get<std::size_t>();
  c.aff_lr = j.at("aff_lr").get<double>();
  c.warmup_epochs = j.at("warmup_epochs").get<std::size_t>();
  c.aff_input = parse_aff_input(j.at("aff_input").get<std::string>());
  c.seed = j.at("seed").get<std::uint64_t>();
  if (!j.at("outlier_rate").is_null()) c.outlier_rate = j.at("outlier_rate").get<double>();
  c.train_frac = j.at("train_frac").get<double>();
  c.calibrate_on_train = j.at("calibrate_on_train").get<bool>();
  return c;
}

nlohmann::json report_to_json(const EvaluationReport& r, const std::string& kind,
                              const ReportOptions& options) {
  auto optional = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
  };
  nlohmann::json j;
  j["record"] = kind;
  j["dataset"] = r.dataset;
  j["method"] = method_name(r.config.method);
  j["config"] = config_to_json(r.config);
  j["auc_roc"] = optional(r.auc_roc);
  j["auc_pr"] = optional(r.auc_pr);
  j["f1"] = r.f1;
  j["threshold"] = r.threshold;
  j["outlier_rate"] = r.outlier_rate;
  j["n_train"] = r.n_train;
  j["n_test"] = r.n_test;
  j["n_test_anomalies"] = r.n_test_anomalies;
  if (options.per_sample) {
    j["scores"] = r.scores;
    j["labels"] = r.labels;
    j["predictions"] = r.predictions;
  }
  if (options.timing) j["seconds"] = r.seconds;
  return j;
}

void write_record(std::ostream& out, const nlohmann::json& record) {
  out << record.dump() << '\n';
}

}  // namespace addm
