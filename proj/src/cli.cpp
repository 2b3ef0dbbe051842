// Copyright 2026 The Pairdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "pairdp/cli.hpp"

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pairdp/dataset.hpp"
#include "pairdp/harness.hpp"
#include "pairdp/jsonio.hpp"
#include "pairdp/losses.hpp"
#include "pairdp/optimizer.hpp"
#include "pairdp/privacy.hpp"
#include "pairdp/stability.hpp"
#include "pairdp/util.hpp"

namespace pairdp {
namespace {

struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::kRanking;
  int n = 0;
  int d = 0;
};

SyntheticSpec parse_synthetic_spec(const std::string& text) {
  std::vector<std::string> parts;
  size_t pos = 0;
  while (true) {
    const size_t comma = text.find(',', pos);
    if (comma == std::string::npos) {
      parts.push_back(text.substr(pos));
      break;
    }
    parts.push_back(text.substr(pos, comma - pos));
    pos = comma + 1;
  }
  if (parts.size() != 3) {
    throw std::invalid_argument("--synthetic expects \"kind,n,d\", got \"" +
                                text + "\"");
  }
  SyntheticSpec spec;
  spec.kind = synthetic_kind_from_string(parts[0]);
  try {
    spec.n = std::stoi(parts[1]);
    spec.d = std::stoi(parts[2]);
  } catch (const std::exception&) {
    throw std::invalid_argument("--synthetic expects integer n and d in \"" +
                                text + "\"");
  }
  if (spec.n < 2 || spec.d < 1) {
    throw std::invalid_argument("--synthetic needs n >= 2 and d >= 1");
  }
  return spec;
}

void emit_vector(JsonWriter* w, std::string_view key,
                 const Eigen::VectorXd& v) {
  w->key(key);
  w->begin_array();
  for (Eigen::Index i = 0; i < v.size(); ++i) w->number(v[i]);
  w->end_array();
}

int cmd_calibrate(double G, int T, int n, double eps, double delta,
                  const std::string& method) {
  NoiseScale scale;
  if (method == "ma") {
    scale = calibrate_sigma_ma(G, T, n, {eps, delta});
  } else if (method == "basic") {
    scale = calibrate_sigma_basic(G, T, n, {eps, delta});
  } else {
    throw std::invalid_argument("--method must be ma or basic, got " + method);
  }
  std::cout << format_double_17(scale.sigma) << "\n";
  return 0;
}

int cmd_train(const std::string& data_path, int csv_d,
              const std::string& synthetic, const std::string& loss_name,
              double lambda, double eps, double delta, int T,
              std::uint64_t seed, double project, double eta, int threads,
              const std::string& out_path) {
  if (data_path.empty() == synthetic.empty()) {
    throw std::invalid_argument(
        "train needs exactly one of --data or --synthetic");
  }

  std::optional<Dataset> data;
  SyntheticSpec spec;
  if (!synthetic.empty()) {
    spec = parse_synthetic_spec(synthetic);
    data.emplace(gen_synthetic(spec.kind, spec.n, spec.d, seed));
  } else {
    if (csv_d < 1) {
      throw std::invalid_argument("--data requires --d (feature dimension)");
    }
    data.emplace(load_dataset(data_path, DatasetDescriptor{csv_d, Bounds{}}));
  }

  const LossKind kind = loss_kind_from_string(loss_name);
  if (kind == LossKind::kCustom) {
    throw std::invalid_argument("train supports ranking or metric losses");
  }
  const PairwiseLoss loss =
      kind == LossKind::kRanking
          ? PairwiseLoss::ranking(data->dim(), lambda, data->bounds())
          : PairwiseLoss::metric(data->dim(), lambda, data->bounds());

  const NoiseScale scale =
      calibrate_sigma_ma(loss.constants().G, T, data->n(), {eps, delta});

  TrainConfig config;
  config.T = T;
  config.eta = eta;
  config.sigma = scale.sigma;
  config.seed = seed;
  config.project_radius = project;
  config.threads = threads;
  const TrainResult result = dp_pairwise_gd(loss, *data, config);

  JsonWriter w;
  w.begin_object();
  w.kv_string("version", "1.0");
  w.kv_string("command", "train");
  w.key("config");
  w.begin_object();
  w.kv_string("loss", loss_name);
  w.kv("lambda", lambda);
  if (!synthetic.empty()) {
    w.kv_string("source", "synthetic");
    w.kv_string("kind", to_string(spec.kind));
    w.kv_int("d", spec.d);
  } else {
    w.kv_string("source", "csv");
    w.kv_string("path", data_path);
    w.kv_int("d", csv_d);
  }
  w.kv_int("n", data->n());
  w.kv("eps", eps);
  w.kv("delta", delta);
  w.kv_int("T", T);
  w.kv_uint("seed", seed);
  w.kv("project_radius", project);
  w.kv_string("sigma_method", "ma");
  w.end_object();
  w.kv("sigma", result.sigma);
  w.kv("eta", result.eta);
  w.kv_uint("noise_seed", result.noise_seed);
  emit_vector(&w, "theta0", result.theta0);
  emit_vector(&w, "theta_priv", result.theta_priv.theta);
  w.kv("final_risk", result.final_risk);
  w.kv_array("risk_trace", result.risk_trace);
  w.kv_array("grad_norm_trace", result.grad_norm_trace);
  w.end_object();
  write_text_file(out_path, w.str());
  return 0;
}

int cmd_stability(const std::string& synthetic, const std::string& loss_name,
                  double lambda, const std::string& method_name, int removals,
                  int pairs, std::uint64_t seed, double tol, int threads,
                  const std::string& out_path) {
  const SyntheticSpec spec = parse_synthetic_spec(synthetic);
  const Dataset data = gen_synthetic(spec.kind, spec.n, spec.d, seed);

  const LossKind kind = loss_kind_from_string(loss_name);
  if (kind == LossKind::kCustom) {
    throw std::invalid_argument("stability supports ranking or metric losses");
  }
  const PairwiseLoss loss =
      kind == LossKind::kRanking
          ? PairwiseLoss::ranking(spec.d, lambda, data.bounds())
          : PairwiseLoss::metric(spec.d, lambda, data.bounds());

  const LooMethod method = loo_method_from_string(method_name);
  SolverConfig solver;
  solver.tol = tol;
  solver.threads = threads;
  const StabilityReport report = beta_statistics(
      loss, data, method, StabilityProbe{removals, pairs, seed}, solver);

  JsonWriter w;
  w.begin_object();
  w.kv_string("version", "1.0");
  w.kv_string("command", "stability");
  w.key("config");
  w.begin_object();
  w.kv_string("loss", loss_name);
  w.kv("lambda", lambda);
  w.kv_string("kind", to_string(spec.kind));
  w.kv_int("n", spec.n);
  w.kv_int("d", spec.d);
  w.kv_string("method", method_name);
  w.kv_int("removals", removals);
  w.kv_int("pairs", pairs);
  w.kv_uint("seed", seed);
  w.kv("solver_tol", tol);
  w.end_object();
  w.kv("beta_uniform", report.beta_uniform);
  w.kv("beta_sup_mean", report.beta_sup_mean);
  w.kv("beta_mean", report.beta_mean);
  w.kv_array_int("removed_indices", report.removed_indices);
  w.kv_array("delta_norms", report.delta_norms);
  w.key("table");
  w.begin_array();
  for (const BetaEntry& entry : report.table) {
    w.begin_object();
    w.kv_int("removed", entry.removed);
    w.kv_int("j", entry.j);
    w.kv_int("k", entry.k);
    w.kv("beta", entry.beta);
    w.end_object();
  }
  w.end_array();
  w.end_object();
  write_text_file(out_path, w.str());
  return 0;
}

int cmd_experiment(const std::string& config_path, const std::string& out_path,
                   int threads_override) {
  ParsedConfig parsed = config_from_json_file(config_path);
  std::string out;
  if (parsed.is_stability) {
    if (threads_override > 0) parsed.stability.threads = threads_override;
    out = report_to_json(stability_experiment(parsed.stability));
  } else {
    if (threads_override > 0) parsed.utility.threads = threads_override;
    out = report_to_json(run_experiment(parsed.utility));
  }
  write_text_file(out_path, out);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Differentially private pairwise learning toolkit"};
  app.require_subcommand(1);

  // calibrate
  auto* calibrate = app.add_subcommand(
      "calibrate", "Print the calibrated Gaussian noise scale");
  double cal_G = 0.0, cal_eps = 0.0, cal_delta = 0.0;
  int cal_T = 0, cal_n = 0;
  std::string cal_method = "ma";
  calibrate->add_option("--G", cal_G, "Pairwise gradient bound")->required();
  calibrate->add_option("--T", cal_T, "Iteration count")->required();
  calibrate->add_option("--n", cal_n, "Sample count")->required();
  calibrate->add_option("--eps", cal_eps, "Privacy budget epsilon")->required();
  calibrate->add_option("--delta", cal_delta, "Privacy budget delta")
      ->required();
  calibrate->add_option("--method", cal_method, "ma or basic");

  // train
  auto* train = app.add_subcommand(
      "train", "Run private pairwise gradient descent and write a JSON report");
  std::string tr_data, tr_synth, tr_loss, tr_out;
  int tr_d = 0, tr_T = 0, tr_threads = 1;
  double tr_lambda = 0.0, tr_eps = 0.0, tr_delta = 0.0, tr_project = 0.0;
  double tr_eta = 0.0;
  std::uint64_t tr_seed = 0;
  train->add_option("--data", tr_data, "CSV dataset path");
  train->add_option("--d", tr_d, "Feature dimension of the CSV data");
  train->add_option("--synthetic", tr_synth, "kind,n,d synthetic dataset");
  train->add_option("--loss", tr_loss, "ranking or metric")->required();
  train->add_option("--lambda", tr_lambda, "Ridge coefficient");
  train->add_option("--eps", tr_eps, "Privacy budget epsilon")->required();
  train->add_option("--delta", tr_delta, "Privacy budget delta")->required();
  train->add_option("--T", tr_T, "Iteration count")->required();
  train->add_option("--seed", tr_seed, "Master seed");
  train->add_option("--project", tr_project, "Projection radius (0 = none)");
  train->add_option("--eta", tr_eta, "Step size (0 = 1/smoothness)");
  train->add_option("--threads", tr_threads, "Worker threads");
  train->add_option("--out", tr_out, "Output JSON path")->required();

  // stability
  auto* stability = app.add_subcommand(
      "stability", "Leave-one-out stability statistics as JSON");
  std::string st_synth, st_loss, st_method = "retrain", st_out;
  double st_lambda = 0.0, st_tol = 1e-10;
  int st_removals = 0, st_pairs = 200, st_threads = 1;
  std::uint64_t st_seed = 0;
  stability->add_option("--synthetic", st_synth, "kind,n,d synthetic dataset")
      ->required();
  stability->add_option("--loss", st_loss, "ranking or metric")->required();
  stability->add_option("--lambda", st_lambda, "Ridge coefficient");
  stability->add_option("--method", st_method, "retrain or influence");
  stability->add_option("--removals", st_removals,
                        "Removal count (0 = min(n, 30))");
  stability->add_option("--pairs", st_pairs, "Probe pairs per removal");
  stability->add_option("--seed", st_seed, "Master seed");
  stability->add_option("--tol", st_tol, "Minimizer tolerance");
  stability->add_option("--threads", st_threads, "Worker threads");
  stability->add_option("--out", st_out, "Output JSON path")->required();

  // experiment
  auto* experiment = app.add_subcommand(
      "experiment", "Run a grid experiment from a JSON config");
  std::string ex_config, ex_out;
  int ex_threads = 0;
  experiment->add_option("--config", ex_config, "Config JSON path")
      ->required();
  experiment->add_option("--out", ex_out, "Output JSON path")->required();
  experiment->add_option("--threads", ex_threads,
                         "Override the config's worker thread count");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (calibrate->parsed()) {
      return cmd_calibrate(cal_G, cal_T, cal_n, cal_eps, cal_delta,
                           cal_method);
    }
    if (train->parsed()) {
      return cmd_train(tr_data, tr_d, tr_synth, tr_loss, tr_lambda, tr_eps,
                       tr_delta, tr_T, tr_seed, tr_project, tr_eta, tr_threads,
                       tr_out);
    }
    if (stability->parsed()) {
      return cmd_stability(st_synth, st_loss, st_lambda, st_method,
                           st_removals, st_pairs, st_seed, st_tol, st_threads,
                           st_out);
    }
    if (experiment->parsed()) {
      return cmd_experiment(ex_config, ex_out, ex_threads);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand selected\n";
  return 1;
}

int run_cli(int argc, const char* const* argv) {
  std::vector<std::string> args;
  args.reserve(static_cast<size_t>(argc > 0 ? argc - 1 : 0));
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace pairdp
