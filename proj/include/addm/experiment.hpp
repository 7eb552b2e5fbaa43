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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "addm/autoencoder.hpp"
#include "addm/dataset.hpp"
#include "addm/density_matrix.hpp"
#include "addm/detector.hpp"
#include "addm/fourier_features.hpp"

namespace addm {

enum class Method : std::uint8_t { Addm = 0, Laddm = 1, Kde = 2, Ae = 3, LaddmNoRecon = 4 };

std::string_view method_name(Method method);
Method parse_method(std::string_view name);

struct ExperimentConfig {
  Method method = Method::Addm;
  double gamma = 1.0;
  std::size_t features = 256;  ///< D
  std::size_t rank = 32;       ///< r, capped at D
  double alpha = 0.5;
  std::vector<std::size_t> encoder_sizes{16, 4};
  /// Likelihood, joint or reconstruction epochs. 0 disables every training
  /// stage, feature fitting and warm-up included.
  std::size_t epochs = 50;
  /// Unset: 0.05 (plain gradient descent, addm) or 1e-2 (Adam, laddm/ae).
  std::optional<double> lr;
  std::size_t batch_size = 64;
  std::size_t aff_epochs = 30;
  std::size_t aff_pairs = 5000;
  double aff_lr = 0.5;
  std::size_t warmup_epochs = 10;
  AffInput aff_input = AffInput::Augmented;
  std::uint64_t seed = 42;
  /// Unset: the anomaly fraction of the scored population (test split), or
  /// of the whole dataset when calibrating on training scores.
  std::optional<double> outlier_rate;
  double train_frac = 0.8;
  bool calibrate_on_train = false;

  double effective_lr() const;
  void validate() const;
};

/// Everything needed to score raw (unstandardized) rows.
struct TrainedModel {
  Method method = Method::Addm;
  ExperimentConfig config;
  Scaler scaler;
  FourierFeatureMap feature_map;  ///< addm, laddm
  DensityMatrixModel density;     ///< addm, laddm
  AutoencoderParams autoencoder;  ///< laddm, ae
  Tensor reference;               ///< kde: standardized training rows
  DetectorModel detector;
};

/// Fit the configured method on standardized normal rows. The detector is
/// left unset.
TrainedModel fit_model(const Tensor& train, const Scaler& scaler, const ExperimentConfig& config);

/// Normality score per standardized row: a density estimate, or the negated
/// reconstruction error for the autoencoder-only method. Low = anomalous.
std::vector<double> normality_scores(const TrainedModel& model, const Tensor& standardized);

/// normality_scores after applying the model's scaler.
std::vector<double> score_raw(const TrainedModel& model, const Tensor& raw);

struct EvaluationReport {
  std::string dataset;
  ExperimentConfig config;
  std::optional<double> auc_roc;  ///< unset when the test split has one class
  std::optional<double> auc_pr;   ///< unset without test anomalies
  double f1 = 0.0;
  double threshold = 0.0;
  double outlier_rate = 0.0;      ///< rate used for the threshold
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::size_t n_test_anomalies = 0;
  std::vector<double> scores;     ///< anomaly scores (negated normality), test order
  std::vector<int> labels;
  std::vector<int> predictions;   ///< 1 = anomaly
  double seconds = 0.0;           ///< wall clock of fit and evaluation
};

struct ExperimentResult {
  EvaluationReport report;
  TrainedModel model;
};

/// Split, standardize, fit, score the test split, threshold and evaluate.
ExperimentResult run_experiment(const LabeledDataset& ds, const ExperimentConfig& config);

/// Metrics of `model` on labeled standardized rows; thresholding follows the
/// model's config. `n_train` only fills the report field.
EvaluationReport evaluate(const TrainedModel& model, const Tensor& standardized,
                          const std::vector<int>& labels, std::string dataset,
                          std::size_t n_train);

/// Axes of a hyper-parameter lattice. An empty axis keeps the base value.
/// Enumeration order: gamma slowest, then features, rank, alpha, encoder,
/// epochs, lr fastest.
struct ParameterGrid {
  std::vector<double> gammas;
  std::vector<std::size_t> features;
  std::vector<std::size_t> ranks;
  std::vector<double> alphas;
  std::vector<std::vector<std::size_t>> encoders;
  std::vector<std::size_t> epochs;
  std::vector<double> lrs;

  std::size_t size() const;
  /// Config at lattice position `index`; its seed is derive_seed(base.seed, index).
  ExperimentConfig at(std::size_t index, const ExperimentConfig& base) const;
  /// This grid with the axes the method ignores cleared.
  ParameterGrid for_method(Method method) const;
};

struct GridSearchResult {
  ExperimentConfig best_config;
  EvaluationReport best_report;
  std::size_t best_index = 0;
  std::vector<EvaluationReport> reports;  ///< successful trials, lattice order
  std::vector<std::size_t> indices;       ///< lattice index of each report
  std::vector<std::string> failures;      ///< "index: message" per failed trial
};

/// Position of the best report: highest AUC-ROC, then AUC-PR, then earliest.
/// Undefined metrics rank below every value.
std::size_t best_report_index(const std::vector<EvaluationReport>& reports);

/// Evaluate the first min(budget, grid.size()) lattice points, in parallel
/// across trials. Best = highest AUC-ROC, then AUC-PR, then lowest index.
GridSearchResult grid_search(const LabeledDataset& ds, const ParameterGrid& grid,
                             const ExperimentConfig& base, std::size_t budget = 100);

struct AblationArm {
  Method method;
  GridSearchResult result;
};

/// Grid search each of kde, ae, laddm-norecon and laddm over its relevant
/// axes of `grid`.
std::vector<AblationArm> run_ablation(const LabeledDataset& ds, const ParameterGrid& grid,
                                      const ExperimentConfig& base, std::size_t budget = 100);

}  // namespace addm
