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

#include "addm/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

#include "addm/error.hpp"
#include "addm/kde.hpp"
#include "addm/metrics.hpp"
#include "addm/rng.hpp"

namespace addm {

namespace {

constexpr struct {
  Method method;
  std::string_view name;
} kMethodNames[] = {{Method::Addm, "addm"},
                    {Method::Laddm, "laddm"},
                    {Method::Kde, "kde"},
                    {Method::Ae, "ae"},
                    {Method::LaddmNoRecon, "laddm-norecon"}};

bool uses_density(Method m) {
  return m == Method::Addm || m == Method::Laddm || m == Method::LaddmNoRecon;
}

bool uses_autoencoder(Method m) {
  return m == Method::Laddm || m == Method::LaddmNoRecon || m == Method::Ae;
}

double rank_key(const std::optional<double>& v) {
  return v ? *v : -std::numeric_limits<double>::infinity();
}

}  // namespace

std::string_view method_name(Method method) {
  for (const auto& e : kMethodNames)
    if (e.method == method) return e.name;
  throw InvalidArgument("unknown method tag " + std::to_string(static_cast<int>(method)));
}

Method parse_method(std::string_view name) {
  for (const auto& e : kMethodNames)
    if (e.name == name) return e.method;
  throw InvalidArgument("unknown method '" + std::string(name) +
                        "', expected addm, laddm, kde, ae or laddm-norecon");
}

double ExperimentConfig::effective_lr() const {
  if (lr) return *lr;
  return method == Method::Addm ? 0.05 : 1e-2;
}

void ExperimentConfig::validate() const {
  if (!(gamma > 0.0)) throw InvalidArgument("config: gamma must be > 0");
  if (!(train_frac > 0.0 && train_frac < 1.0))
    throw InvalidArgument("config: train fraction must be in (0, 1)");
  if (outlier_rate && !(*outlier_rate >= 0.0 && *outlier_rate <= 1.0))
    throw InvalidArgument("config: outlier rate must be in [0, 1]");
  if (!(effective_lr() >= 0.0)) throw InvalidArgument("config: lr must be >= 0");
  if (batch_size < 1) throw InvalidArgument("config: batch size must be >= 1");
  if (uses_density(method)) {
    if (features < 1) throw InvalidArgument("config: features must be >= 1");
    if (rank < 1) throw InvalidArgument("config: rank must be >= 1");
    if (aff_pairs < 1) throw InvalidArgument("config: aff pairs must be >= 1");
    if (!(aff_lr >= 0.0)) throw InvalidArgument("config: aff lr must be >= 0");
  }
  if (uses_autoencoder(method)) {
    if (encoder_sizes.empty()) throw InvalidArgument("config: encoder sizes must not be empty");
    for (std::size_t s : encoder_sizes)
      if (s < 1) throw InvalidArgument("config: encoder sizes must be >= 1");
  }
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("config: alpha must be in [0, 1]");
}

TrainedModel fit_model(const Tensor& train, const Scaler& scaler, const ExperimentConfig& config) {
  config.validate();
  if (train.rank() != 2 || train.rows() < 2)
    throw InvalidArgument("fit: need at least 2 training rows");
  TrainedModel m;
  m.method = config.method;
  m.config = config;
  m.scaler = scaler;
  const bool trains = config.epochs > 0;

  switch (config.method) {
    case Method::Addm: {
      m.feature_map = sample_rff(train.cols(), config.features, config.gamma,
                                 derive_seed(config.seed, 10));
      if (trains) {
        const AffOptions aff{config.aff_pairs, config.aff_epochs, config.aff_lr,
                             config.batch_size, 2000, derive_seed(config.seed, 11)};
        m.feature_map = train_aff(m.feature_map, train, config.gamma, aff).map;
      }
      const Tensor F = normalized_feature_map(m.feature_map, train);
      m.density = fit_density_model(F, std::min(config.rank, config.features),
                                    normalization_constant({config.gamma, train.cols()}));
      if (trains) {
        const MleOptions mle{config.epochs, config.effective_lr(), config.batch_size,
                             derive_seed(config.seed, 12)};
        m.density = train_mle(m.density, F, mle).model;
      }
      break;
    }
    case Method::Laddm:
    case Method::LaddmNoRecon: {
      LaddmConfig lc;
      lc.encoder_sizes = config.encoder_sizes;
      lc.gamma = config.gamma;
      lc.features = config.features;
      lc.rank = std::min(config.rank, config.features);
      lc.alpha = config.method == Method::LaddmNoRecon ? 1.0 : config.alpha;
      lc.epochs = config.epochs;
      lc.lr = config.effective_lr();
      lc.batch_size = config.batch_size;
      lc.warmup_epochs = config.warmup_epochs;
      lc.aff = AffOptions{config.aff_pairs, config.aff_epochs, config.aff_lr, config.batch_size,
                          2000, config.seed};
      lc.aff_input = config.aff_input;
      lc.seed = config.seed;
      LaddmModel lm = train_laddm(train, lc).model;
      m.autoencoder = std::move(lm.autoencoder);
      m.feature_map = std::move(lm.feature_map);
      m.density = std::move(lm.density);
      break;
    }
    case Method::Kde:
      m.reference = train;
      break;
    case Method::Ae: {
      m.autoencoder =
          make_autoencoder(train.cols(), config.encoder_sizes, derive_seed(config.seed, 0));
      const AutoencoderTrainOptions opts{config.epochs, config.effective_lr(), config.batch_size,
                                         derive_seed(config.seed, 1)};
      m.autoencoder = train_autoencoder(m.autoencoder, train, opts).params;
      break;
    }
  }
  return m;
}

std::vector<double> normality_scores(const TrainedModel& model, const Tensor& standardized) {
  switch (model.method) {
    case Method::Addm:
      return estimate_densities(model.density,
                                normalized_feature_map(model.feature_map, standardized));
    case Method::Laddm:
    case Method::LaddmNoRecon:
      return score_laddm({model.autoencoder, model.feature_map, model.density,
                          model.config.aff_input},
                         standardized);
    case Method::Kde:
      return kde_estimate(model.reference, standardized,
                          {model.config.gamma, model.reference.cols()});
    case Method::Ae: {
      auto err = reconstruction_errors(model.autoencoder, standardized);
      for (double& e : err) e = -e;
      return err;
    }
  }
  throw InvalidArgument("normality_scores: unknown method");
}

std::vector<double> score_raw(const TrainedModel& model, const Tensor& raw) {
  return normality_scores(model, model.scaler.transform(raw));
}

EvaluationReport evaluate(const TrainedModel& model, const Tensor& standardized,
                          const std::vector<int>& labels, std::string dataset,
                          std::size_t n_train) {
  if (standardized.rows() != labels.size())
    throw ShapeError("evaluate: " + std::to_string(standardized.rows()) + " rows vs " +
                     std::to_string(labels.size()) + " labels");
  if (labels.empty()) throw InvalidArgument("evaluate: empty test set");
  EvaluationReport r;
  r.dataset = std::move(dataset);
  r.config = model.config;
  r.n_train = n_train;
  r.n_test = labels.size();
  r.n_test_anomalies = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  r.labels = labels;

  const auto density = normality_scores(model, standardized);
  r.outlier_rate = model.config.outlier_rate.value_or(static_cast<double>(r.n_test_anomalies) /
                                                      static_cast<double>(r.n_test));
  r.threshold = model.config.calibrate_on_train ? model.detector.tau
                                                : compute_threshold(density, r.outlier_rate);
  if (model.config.calibrate_on_train) r.outlier_rate = model.detector.outlier_rate;
  r.predictions = classify_all(density, {r.threshold, r.outlier_rate});
  r.scores = anomaly_scores(density);
  if (r.n_test_anomalies > 0) {
    r.auc_pr = auc_pr(r.scores, r.labels);
    if (r.n_test_anomalies < r.n_test) r.auc_roc = auc_roc(r.scores, r.labels);
  }
  r.f1 = f1_score(r.predictions, r.labels);
  return r;
}

ExperimentResult run_experiment(const LabeledDataset& ds, const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.validate();
  const DataSplit split = split_and_standardize(ds, config.train_frac, config.seed);
  ExperimentResult out{{}, fit_model(split.train, split.scaler, config)};
  if (config.calibrate_on_train) {
    const double rate = config.outlier_rate.value_or(ds.outlier_rate());
    out.model.detector = fit_detector(normality_scores(out.model, split.train), rate);
  }
  out.report = evaluate(out.model, split.test, split.test_labels, ds.name, split.train.rows());
  if (!config.calibrate_on_train) out.model.detector = {out.report.threshold, out.report.outlier_rate};
  out.report.seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::size_t ParameterGrid::size() const {
  auto n = [](std::size_t k) { return std::max<std::size_t>(k, 1); };
  return n(gammas.size()) * n(features.size()) * n(ranks.size()) * n(alphas.size()) *
         n(encoders.size()) * n(epochs.size()) * n(lrs.size());
}

ExperimentConfig ParameterGrid::at(std::size_t index, const ExperimentConfig& base) const {
  if (index >= size()) throw InvalidArgument("ParameterGrid::at: index out of range");
  ExperimentConfig c = base;
  std::size_t rest = index;
  // Fastest axis first.
  auto take = [&rest](const auto& axis, auto& field) {
    if (axis.empty()) return;
    field = axis[rest % axis.size()];
    rest /= axis.size();
  };
  std::optional<double> lr = c.lr;
  if (!lrs.empty()) {
    lr = lrs[rest % lrs.size()];
    rest /= lrs.size();
  }
  c.lr = lr;
  take(epochs, c.epochs);
  take(encoders, c.encoder_sizes);
  take(alphas, c.alpha);
  take(ranks, c.rank);
  take(features, c.features);
  take(gammas, c.gamma);
  c.seed = derive_seed(base.seed, index);
  return c;
}

ParameterGrid ParameterGrid::for_method(Method method) const {
  ParameterGrid g = *this;
  if (!uses_density(method)) {
    g.features.clear();
    g.ranks.clear();
  }
  if (method != Method::Laddm) g.alphas.clear();
  if (!uses_autoencoder(method)) g.encoders.clear();
  if (method == Method::Kde) {
    g.epochs.clear();
    g.lrs.clear();
  }
  if (method == Method::Ae) g.gammas.clear();
  return g;
}

std::size_t best_report_index(const std::vector<EvaluationReport>& reports) {
  if (reports.empty()) throw InvalidArgument("best_report_index: no reports");
  std::size_t best = 0;
  for (std::size_t k = 1; k < reports.size(); ++k) {
    const double ra = rank_key(reports[k].auc_roc), rb = rank_key(reports[best].auc_roc);
    if (ra > rb || (ra == rb && rank_key(reports[k].auc_pr) > rank_key(reports[best].auc_pr)))
      best = k;
  }
  return best;
}

GridSearchResult grid_search(const LabeledDataset& ds, const ParameterGrid& grid,
                             const ExperimentConfig& base, std::size_t budget) {
  if (budget < 1) throw InvalidArgument("grid_search: budget must be >= 1");
  const std::size_t n = std::min(budget, grid.size());
  std::vector<std::optional<EvaluationReport>> reports(n);
  std::vector<std::string> errors(n);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::size_t i = 0; i < n; ++i) {
    try {
      reports[i] = run_experiment(ds, grid.at(i, base)).report;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }

  GridSearchResult out;
  for (std::size_t i = 0; i < n; ++i) {
    if (!reports[i]) {
      out.failures.push_back(std::to_string(i) + ": " + errors[i]);
      continue;
    }
    out.indices.push_back(i);
    out.reports.push_back(std::move(*reports[i]));
  }
  if (out.reports.empty()) {
    std::string msg = "grid_search: all " + std::to_string(n) + " configurations failed";
    for (const auto& f : out.failures) msg += "\n  " + f;
    throw Error(msg);
  }
  const std::size_t best = best_report_index(out.reports);
  out.best_index = out.indices[best];
  out.best_report = out.reports[best];
  out.best_config = out.best_report.config;
  return out;
}

std::vector<AblationArm> run_ablation(const LabeledDataset& ds, const ParameterGrid& grid,
                                      const ExperimentConfig& base, std::size_t budget) {
  std::vector<AblationArm> arms;
  for (Method m : {Method::Kde, Method::Ae, Method::LaddmNoRecon, Method::Laddm}) {
    ExperimentConfig cfg = base;
    cfg.method = m;
    arms.push_back({m, grid_search(ds, grid.for_method(m), cfg, budget)});
  }
  return arms;
}

}  // namespace addm
