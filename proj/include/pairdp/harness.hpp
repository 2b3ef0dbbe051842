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
//
// Experiment driver: runs calibrated private training over (d, n, eps, seed)
// grids, estimates excess risks, aggregates per cell, and fits log-log
// scaling slopes with bootstrap confidence intervals. Reports serialize to
// canonical JSON and are byte-identical across runs and thread counts.

#ifndef PAIRDP_HARNESS_HPP_
#define PAIRDP_HARNESS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "pairdp/dataset.hpp"
#include "pairdp/losses.hpp"
#include "pairdp/optimizer.hpp"
#include "pairdp/stability.hpp"

namespace pairdp {

// Iteration count schedules. The logarithmic rules grow T with the work the
// privacy budget can absorb; the constant in front is a recorded knob.
enum class TRule { kLogNEps, kLogSqrtNEps, kFixed };

TRule t_rule_from_string(const std::string& name);
std::string to_string(TRule rule);

// T for one grid cell: max(1, ceil(t_scale * ln(n eps / sqrt(p)))) for
// kLogNEps, max(1, ceil(t_scale * ln(sqrt(n) eps))) for kLogSqrtNEps, and
// t_fixed for kFixed.
int t_for_cell(TRule rule, double t_scale, int t_fixed, int n, double eps,
               int p);

enum class SigmaMethod { kMa, kBasic, kNone };

SigmaMethod sigma_method_from_string(const std::string& name);
std::string to_string(SigmaMethod method);

struct ExperimentConfig {
  // Loss and data family. Synthetic data uses the matching population.
  SyntheticKind kind = SyntheticKind::kRanking;
  double lambda = 0.1;
  Bounds bounds;

  std::vector<int> d_grid{5};
  std::vector<int> n_grid;
  std::vector<double> eps_grid;
  double delta = 1e-5;

  TRule t_rule = TRule::kLogNEps;
  double t_scale = 3.0;
  int t_fixed = 10;

  int seeds = 20;
  std::uint64_t master_seed = 1;

  SigmaMethod sigma_method = SigmaMethod::kMa;

  // Population-risk machinery. mc_pairs = 0 disables it (no reference model
  // is trained and population fields come out null). The reference model is
  // fit on one dataset of ref_multiplier * max(n_grid) samples per d.
  std::int64_t mc_pairs = 0;
  double ref_multiplier = 2.0;
  double ref_tol = 1e-6;

  // High-probability statistics use the empirical (1 - xi) quantile.
  double xi = 0.1;

  // Training knobs passed through to dp_pairwise_gd.
  double eta = 0.0;            // 0 = 1 / (L + 2 lambda)
  double init_radius = -1.0;   // < 0 = auto
  double project_radius = 0.0; // 0 = no projection

  // Non-private minimizer settings.
  double solver_tol = 1e-10;
  long solver_max_iter = 200000;

  int threads = 1;

  // Wall-clock guard per grid cell; remaining records of a cell that blows
  // the budget are marked, not computed. 0 disables the guard, which is the
  // right setting when byte-identical reports matter more than bounded
  // runtime.
  double cell_budget_seconds = 60.0;

  // Per-record wall times are measured only when requested, because timing
  // fields vary run to run and break byte-identical reports.
  bool emit_timing = false;

  // Slope-fit anchors: the fixed values of the other axes when fitting along
  // one axis. 0 (or 0.0) picks the median grid element.
  int fit_anchor_n = 0;
  double fit_anchor_eps = 0.0;
  int fit_anchor_d = 0;
};

void validate_config(const ExperimentConfig& config);

// One (d, n, eps, seed) training run. Failed runs carry the error text in
// status and NaN numerics (serialized as null).
struct ExperimentRecord {
  int d = 0;
  int p = 0;
  int n = 0;
  double eps = 0.0;
  int seed_index = 0;

  std::uint64_t data_seed = 0;
  std::uint64_t train_seed = 0;
  std::uint64_t noise_seed = 0;
  std::uint64_t mc_seed = 0;

  int T = 0;
  double sigma = 0.0;
  double eta = 0.0;

  double risk_star = 0.0;
  double risk_priv = 0.0;
  double excess_empirical = 0.0;
  double excess_population = 0.0;
  double generalization_error = 0.0;
  double approximation_gap = 0.0;
  double population_risk_priv = 0.0;
  double total_std_err = 0.0;

  double star_grad_norm = 0.0;
  long star_iterations = 0;

  double runtime_seconds = 0.0;  // NaN unless emit_timing
  std::string status = "ok";
};

// Per-cell summary over the seeds that succeeded.
struct CellAggregate {
  int d = 0;
  int n = 0;
  double eps = 0.0;
  int count_ok = 0;
  int count_failed = 0;
  double mean_excess_empirical = 0.0;
  double median_excess_empirical = 0.0;
  double quantile_excess_empirical = 0.0;
  double mean_excess_population = 0.0;
  double median_excess_population = 0.0;
  double quantile_excess_population = 0.0;
};

enum class ScalingAxis { kN, kEps, kP };

ScalingAxis scaling_axis_from_string(const std::string& name);
std::string to_string(ScalingAxis axis);

enum class ScalingStatistic {
  kMeanExcessEmpirical,
  kMeanExcessPopulation,
  kQuantileExcessPopulation,
};

std::string to_string(ScalingStatistic statistic);

struct SlopeFit {
  std::string axis;
  std::string statistic;
  double slope = 0.0;
  double intercept = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::vector<double> xs;
  std::vector<double> ys;
  bool valid = false;
  std::string note;  // why the fit is invalid, when it is
};

struct ExperimentReport {
  ExperimentConfig config;
  std::vector<ExperimentRecord> records;
  std::vector<CellAggregate> aggregates;
  std::vector<SlopeFit> slopes;
  // Reference models per d (empty when mc_pairs = 0).
  std::vector<int> reference_d;
  std::vector<int> reference_n;
  std::vector<double> reference_risk;
};

// Runs the full grid. Deterministic given config.master_seed (with
// emit_timing off and the cell budget not triggering); cell failures are
// recorded per record and do not abort the run.
ExperimentReport run_experiment(const ExperimentConfig& config);

// Least-squares slope of log(y) on log(x). Requires >= 3 points, all
// positive; throws std::invalid_argument otherwise.
void fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                   double* slope, double* intercept);

// Slope of the chosen statistic along one axis, holding the other axes at
// the config anchors. The confidence interval is a seed bootstrap (B = 1000,
// deterministic given the report's master seed). If any point on the line is
// non-positive or fewer than 3 grid values exist, the fit comes back with
// valid = false and a note instead of throwing.
SlopeFit scaling_fit(const ExperimentReport& report, ScalingAxis axis,
                     ScalingStatistic statistic);

// Canonical JSON (keys config, records, aggregates, slopes, version).
std::string report_to_json(const ExperimentReport& report);

// ----- Stability experiment -----

struct StabilityExperimentConfig {
  SyntheticKind kind = SyntheticKind::kRanking;
  double lambda = 0.1;
  int d = 5;
  std::vector<int> n_grid;
  int seeds = 20;
  std::uint64_t master_seed = 1;
  int removals = 0;  // 0 = min(n, 30)
  int pairs = 200;
  int replacements = 10;
  // Run every (n, seed) twice, on a clustered dataset and on the same
  // dataset with one adversarial sample, to expose the gap between the
  // uniform and on-average stability coefficients.
  bool compare_outlier = false;
  double solver_tol = 1e-10;
  long solver_max_iter = 200000;
  int threads = 1;
};

void validate_config(const StabilityExperimentConfig& config);

struct StabilityRow {
  std::string style;  // "uniform" or "outlier"
  int n = 0;
  int seed_index = 0;
  std::uint64_t data_seed = 0;
  std::uint64_t probe_seed = 0;
  // Retrained and influence-approximated leave-one-out statistics.
  double retrain_beta_uniform = 0.0;
  double retrain_beta_sup_mean = 0.0;
  double retrain_beta_mean = 0.0;
  double influence_beta_uniform = 0.0;
  double influence_beta_sup_mean = 0.0;
  double influence_beta_mean = 0.0;
  double max_delta_norm = 0.0;
  double kappa = 0.0;
  double g_kappa = 0.0;
  // n * beta_uniform and the uniform/on-average ratio, the two columns the
  // scaling comparison reads.
  double n_beta_uniform = 0.0;
  double ratio_uniform_to_sup_mean = 0.0;
  std::string status = "ok";
};

struct StabilityCellAggregate {
  std::string style;
  int n = 0;
  int count_ok = 0;
  int count_failed = 0;
  double median_beta_uniform = 0.0;
  double median_beta_sup_mean = 0.0;
  double median_beta_mean = 0.0;
  double median_n_beta_uniform = 0.0;
  double median_ratio = 0.0;
  double median_kappa = 0.0;
  double median_g_kappa = 0.0;
};

struct StabilityExperimentReport {
  StabilityExperimentConfig config;
  std::vector<StabilityRow> rows;
  std::vector<StabilityCellAggregate> aggregates;
};

// Clustered synthetic dataset (features in a ball of radius 0.3) used by the
// stability comparisons; with_outlier replaces sample 0 by a unit-norm point
// whose label contradicts the population direction.
Dataset make_clustered_dataset(SyntheticKind kind, int n, int d,
                               std::uint64_t seed, bool with_outlier);

StabilityExperimentReport stability_experiment(
    const StabilityExperimentConfig& config);

std::string report_to_json(const StabilityExperimentReport& report);

// ----- Config files -----

// Reads an ExperimentConfig or StabilityExperimentConfig from a flat JSON
// document, keyed by "mode": "utility" (default) or "stability". Unknown
// keys are rejected, which catches typos before a long run burns time.
struct ParsedConfig {
  bool is_stability = false;
  ExperimentConfig utility;
  StabilityExperimentConfig stability;
};

ParsedConfig config_from_json_file(const std::string& path);

}  // namespace pairdp

#endif  // PAIRDP_HARNESS_HPP_
