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

// Command-line front end: fit, score, eval, gridsearch and ablate.

#include <CLI11.hpp>
#include <charconv>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "addm/dataset.hpp"
#include "addm/error.hpp"
#include "addm/experiment.hpp"
#include "addm/model_io.hpp"
#include "addm/report.hpp"

namespace {

using addm::InvalidArgument;

// Flags are kept as text so the grid commands can accept comma lists.
struct Flags {
  std::string data, model, out;
  std::string method = "addm";
  std::string gamma, features, rank, alpha, encoder, epochs, lr;
  std::string seed = "42";
  std::string outlier_rate, train_frac = "0.8";
  std::string aff_input = "augmented";
  std::string batch_size, aff_epochs, aff_pairs, aff_lr, warmup_epochs;
  bool calibrate_on_train = false;
  bool timing = false;
  std::size_t budget = 100;
};

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto at = s.find(sep, start);
    out.push_back(s.substr(start, at - start));
    if (at == std::string::npos) return out;
    start = at + 1;
  }
}

template <typename T>
T parse_value(const std::string& text, const char* flag) {
  T v{};
  const char* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end)
    throw InvalidArgument(std::string("--") + flag + ": cannot parse '" + text + "'");
  return v;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* flag) {
  std::vector<T> out;
  if (text.empty()) return out;
  for (const auto& part : split(text, ',')) out.push_back(parse_value<T>(part, flag));
  return out;
}

template <typename T>
void set_single(const std::string& text, const char* flag, T& field) {
  const auto v = parse_list<T>(text, flag);
  if (v.size() > 1)
    throw InvalidArgument(std::string("--") + flag + " takes one value outside gridsearch/ablate");
  if (!v.empty()) field = v.front();
}

std::vector<std::vector<std::size_t>> parse_encoders(const std::string& text) {
  std::vector<std::vector<std::size_t>> out;
  if (text.empty()) return out;
  for (const auto& arch : split(text, ';')) out.push_back(parse_list<std::size_t>(arch, "encoder"));
  return out;
}

void add_shared(CLI::App* app, Flags& f) {
  app->add_option("--data", f.data, "CSV file: feature columns then a 0/1 label")->required();
  app->add_option("--method", f.method, "addm | laddm | kde | ae | laddm-norecon");
  app->add_option("--gamma", f.gamma, "Gaussian kernel parameter");
  app->add_option("--features", f.features, "Fourier feature count D");
  app->add_option("--rank", f.rank, "retained eigenpairs r");
  app->add_option("--alpha", f.alpha, "reconstruction / likelihood trade-off in [0, 1]");
  app->add_option("--encoder", f.encoder, "encoder layer sizes, e.g. 16,4");
  app->add_option("--epochs", f.epochs, "training epochs (0 disables training)");
  app->add_option("--lr", f.lr, "learning rate");
  app->add_option("--seed", f.seed, "base random seed");
  app->add_option("--outlier-rate", f.outlier_rate, "quantile used for the threshold");
  app->add_option("--train-frac", f.train_frac, "fraction of normal rows used for training");
  app->add_option("--aff-input", f.aff_input, "latent | augmented");
  app->add_option("--batch-size", f.batch_size, "minibatch size");
  app->add_option("--aff-epochs", f.aff_epochs, "feature-fit epochs");
  app->add_option("--aff-pairs", f.aff_pairs, "feature-fit pairs per epoch");
  app->add_option("--aff-lr", f.aff_lr, "feature-fit learning rate");
  app->add_option("--warmup-epochs", f.warmup_epochs, "reconstruction-only epochs before the feature fit");
  app->add_flag("--calibrate-on-train", f.calibrate_on_train,
                "take the threshold from training scores instead of the scored batch");
  app->add_flag("--timing", f.timing, "add wall-clock seconds to reports");
  app->add_option("--model", f.model, "model file");
  app->add_option("--out", f.out, "report file (default: stdout)");
}

addm::ExperimentConfig base_config(const Flags& f) {
  addm::ExperimentConfig c;
  c.method = addm::parse_method(f.method);
  c.aff_input = addm::parse_aff_input(f.aff_input);
  c.seed = parse_value<std::uint64_t>(f.seed, "seed");
  c.train_frac = parse_value<double>(f.train_frac, "train-frac");
  if (!f.outlier_rate.empty()) c.outlier_rate = parse_value<double>(f.outlier_rate, "outlier-rate");
  set_single(f.batch_size, "batch-size", c.batch_size);
  set_single(f.aff_epochs, "aff-epochs", c.aff_epochs);
  set_single(f.aff_pairs, "aff-pairs", c.aff_pairs);
  set_single(f.aff_lr, "aff-lr", c.aff_lr);
  set_single(f.warmup_epochs, "warmup-epochs", c.warmup_epochs);
  c.calibrate_on_train = f.calibrate_on_train;
  return c;
}

addm::ExperimentConfig single_config(const Flags& f) {
  addm::ExperimentConfig c = base_config(f);
  set_single(f.gamma, "gamma", c.gamma);
  set_single(f.features, "features", c.features);
  set_single(f.rank, "rank", c.rank);
  set_single(f.alpha, "alpha", c.alpha);
  set_single(f.epochs, "epochs", c.epochs);
  if (!f.lr.empty()) c.lr = parse_value<double>(f.lr, "lr");
  const auto enc = parse_encoders(f.encoder);
  if (enc.size() > 1) throw InvalidArgument("--encoder takes one architecture outside gridsearch/ablate");
  if (!enc.empty()) c.encoder_sizes = enc.front();
  return c;
}

addm::ParameterGrid grid_of(const Flags& f) {
  addm::ParameterGrid g;
  g.gammas = parse_list<double>(f.gamma, "gamma");
  g.features = parse_list<std::size_t>(f.features, "features");
  g.ranks = parse_list<std::size_t>(f.rank, "rank");
  g.alphas = parse_list<double>(f.alpha, "alpha");
  g.encoders = parse_encoders(f.encoder);
  g.epochs = parse_list<std::size_t>(f.epochs, "epochs");
  g.lrs = parse_list<double>(f.lr, "lr");
  return g;
}

// Report sink: --out file or stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty()) return;
    file_ = std::make_unique<std::ofstream>(path, std::ios::trunc);
    if (!*file_) throw addm::Error("cannot write report '" + path + "'");
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

int run(int argc, char** argv) {
  CLI::App app{"Density-matrix anomaly detection"};
  app.require_subcommand(1);
  Flags f;
  auto* fit = app.add_subcommand("fit", "train on a dataset split and save the model");
  auto* score = app.add_subcommand("score", "score every row of a dataset with a saved model");
  auto* eval = app.add_subcommand("eval", "train and evaluate one configuration");
  auto* grid = app.add_subcommand("gridsearch", "evaluate a hyper-parameter lattice");
  auto* ablate = app.add_subcommand("ablate", "compare kde, ae, laddm-norecon and laddm");
  for (auto* sub : {fit, score, eval, grid, ablate}) add_shared(sub, f);
  fit->get_option("--model")->required();
  score->get_option("--model")->required();
  for (auto* sub : {grid, ablate})
    sub->add_option("--budget", f.budget, "maximum configurations per search")->check(
        CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const addm::ReportOptions full{true, f.timing};
  const addm::ReportOptions summary{false, f.timing};
  const addm::LabeledDataset ds = addm::load_dataset(f.data);

  if (fit->parsed() || eval->parsed()) {
    const auto result = addm::run_experiment(ds, single_config(f));
    if (!f.model.empty()) addm::save_model(f.model, result.model);
    Output out(f.out);
    addm::write_record(out.stream(), addm::report_to_json(result.report, fit->parsed() ? "fit" : "evaluation",
                                                          fit->parsed() ? summary : full));
  } else if (score->parsed()) {
    const auto model = addm::load_model(f.model);
    const auto report = addm::evaluate(model, model.scaler.transform(ds.X), ds.y, ds.name, 0);
    Output out(f.out);
    addm::write_record(out.stream(), addm::report_to_json(report, "score", full));
  } else if (grid->parsed()) {
    const auto result = addm::grid_search(ds, grid_of(f), base_config(f), f.budget);
    Output out(f.out);
    for (std::size_t k = 0; k < result.reports.size(); ++k) {
      auto rec = addm::report_to_json(result.reports[k], "trial", summary);
      rec["trial"] = result.indices[k];
      addm::write_record(out.stream(), rec);
    }
    for (const auto& failure : result.failures) {
      addm::write_record(out.stream(), {{"record", "failure"}, {"message", failure}});
    }
    auto best = addm::report_to_json(result.best_report, "best", full);
    best["trial"] = result.best_index;
    addm::write_record(out.stream(), best);
  } else if (ablate->parsed()) {
    const auto arms = addm::run_ablation(ds, grid_of(f), base_config(f), f.budget);
    Output out(f.out);
    for (const auto& arm : arms) {
      auto rec = addm::report_to_json(arm.result.best_report, "ablation", summary);
      rec["trial"] = arm.result.best_index;
      rec["trials"] = arm.result.reports.size();
      addm::write_record(out.stream(), rec);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
