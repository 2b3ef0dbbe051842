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

#include "pairdp/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "pairdp/jsonio.hpp"
#include "pairdp/parallel.hpp"
#include "pairdp/privacy.hpp"
#include "pairdp/risk.hpp"
#include "pairdp/rng.hpp"
#include "pairdp/util.hpp"

namespace pairdp {
namespace {

constexpr const char* kReportVersion = "1.0";
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Seed-derivation tags private to the harness (the per-stream tags live in
// stream_tag; these separate the harness-level chains).
constexpr std::uint64_t kTrainChain = 0x7261494E00000001ULL;
constexpr std::uint64_t kClusterChain = 0xC10C000000000002ULL;

std::uint64_t eps_bits(double eps) { return std::bit_cast<std::uint64_t>(eps); }

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t m = v.size();
  if (m % 2 == 1) return v[m / 2];
  return 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

// Upper empirical q-quantile: smallest element with rank >= ceil(q * m).
double upper_quantile_of(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  const auto m = static_cast<std::int64_t>(v.size());
  std::int64_t rank = static_cast<std::int64_t>(
      std::ceil(q * static_cast<double>(m)));
  rank = std::min(std::max<std::int64_t>(rank, 1), m);
  return v[static_cast<size_t>(rank - 1)];
}

PairwiseLoss make_loss(SyntheticKind kind, int d, double lambda,
                       const Bounds& bounds) {
  return kind == SyntheticKind::kRanking
             ? PairwiseLoss::ranking(d, lambda, bounds)
             : PairwiseLoss::metric(d, lambda, bounds);
}

int param_dim_for(SyntheticKind kind, int d) {
  return kind == SyntheticKind::kRanking ? d : d * d;
}

}  // namespace

TRule t_rule_from_string(const std::string& name) {
  if (name == "log_n_eps") return TRule::kLogNEps;
  if (name == "log_sqrtn_eps") return TRule::kLogSqrtNEps;
  if (name == "fixed") return TRule::kFixed;
  throw std::invalid_argument("unknown t_rule: " + name);
}

std::string to_string(TRule rule) {
  switch (rule) {
    case TRule::kLogNEps: return "log_n_eps";
    case TRule::kLogSqrtNEps: return "log_sqrtn_eps";
    case TRule::kFixed: return "fixed";
  }
  return "?";
}

int t_for_cell(TRule rule, double t_scale, int t_fixed, int n, double eps,
               int p) {
  switch (rule) {
    case TRule::kLogNEps: {
      const double arg = static_cast<double>(n) * eps /
                         std::sqrt(static_cast<double>(p));
      return std::max(1, static_cast<int>(std::ceil(t_scale * std::log(arg))));
    }
    case TRule::kLogSqrtNEps: {
      const double arg = std::sqrt(static_cast<double>(n)) * eps;
      return std::max(1, static_cast<int>(std::ceil(t_scale * std::log(arg))));
    }
    case TRule::kFixed:
      return t_fixed;
  }
  throw std::logic_error("t_for_cell: bad rule");
}

SigmaMethod sigma_method_from_string(const std::string& name) {
  if (name == "ma") return SigmaMethod::kMa;
  if (name == "basic") return SigmaMethod::kBasic;
  if (name == "none") return SigmaMethod::kNone;
  throw std::invalid_argument("unknown sigma_method: " + name);
}

std::string to_string(SigmaMethod method) {
  switch (method) {
    case SigmaMethod::kMa: return "ma";
    case SigmaMethod::kBasic: return "basic";
    case SigmaMethod::kNone: return "none";
  }
  return "?";
}

ScalingAxis scaling_axis_from_string(const std::string& name) {
  if (name == "n") return ScalingAxis::kN;
  if (name == "eps") return ScalingAxis::kEps;
  if (name == "p") return ScalingAxis::kP;
  throw std::invalid_argument("unknown scaling axis: " + name);
}

std::string to_string(ScalingAxis axis) {
  switch (axis) {
    case ScalingAxis::kN: return "n";
    case ScalingAxis::kEps: return "eps";
    case ScalingAxis::kP: return "p";
  }
  return "?";
}

std::string to_string(ScalingStatistic statistic) {
  switch (statistic) {
    case ScalingStatistic::kMeanExcessEmpirical:
      return "mean_excess_empirical";
    case ScalingStatistic::kMeanExcessPopulation:
      return "mean_excess_population";
    case ScalingStatistic::kQuantileExcessPopulation:
      return "quantile_excess_population";
  }
  return "?";
}

void validate_config(const ExperimentConfig& config) {
  if (config.d_grid.empty() || config.n_grid.empty() ||
      config.eps_grid.empty()) {
    throw std::invalid_argument("experiment config: all grids must be "
                                "non-empty");
  }
  for (int d : config.d_grid) {
    if (d < 1) throw std::invalid_argument("experiment config: d must be >= 1");
  }
  for (int n : config.n_grid) {
    if (n < 2) throw std::invalid_argument("experiment config: n must be >= 2");
  }
  for (double e : config.eps_grid) {
    if (!(e > 0.0)) {
      throw std::invalid_argument("experiment config: eps must be > 0");
    }
  }
  if (config.seeds < 1) {
    throw std::invalid_argument("experiment config: seeds must be >= 1");
  }
  if (!(config.xi > 0.0) || !(config.xi < 1.0)) {
    throw std::invalid_argument("experiment config: xi must be in (0, 1)");
  }
  if (!(config.delta > 0.0) || !(config.delta < 1.0)) {
    throw std::invalid_argument("experiment config: delta must be in (0, 1)");
  }
  if (!(config.lambda >= 0.0)) {
    throw std::invalid_argument("experiment config: lambda must be >= 0");
  }
  if (!(config.t_scale > 0.0) || config.t_fixed < 1) {
    throw std::invalid_argument("experiment config: T rule constants must be "
                                "positive");
  }
  if (config.mc_pairs < 0) {
    throw std::invalid_argument("experiment config: mc_pairs must be >= 0");
  }
  if (config.mc_pairs > 0 && !(config.ref_multiplier >= 1.0)) {
    throw std::invalid_argument("experiment config: ref_multiplier must be "
                                ">= 1 when mc_pairs > 0");
  }
}

namespace {

// Phase-1 unit: one dataset and its non-private minimizer.
struct StarSolve {
  std::uint64_t data_seed = 0;
  std::optional<Dataset> data;
  Eigen::VectorXd theta_star;
  double risk = kNaN;
  double grad_norm = kNaN;
  long iterations = 0;
  std::string error;  // empty = usable
};

struct ReferenceSolve {
  int d = 0;
  int n_ref = 0;
  Eigen::VectorXd theta_ref;
  double risk = kNaN;
  std::string error;
};

// Index helpers for the flat record vector (d, n, eps, seed loops).
struct GridShape {
  size_t nd, nn, ne, ns;
  size_t record_index(size_t di, size_t ni, size_t ei, size_t si) const {
    return ((di * nn + ni) * ne + ei) * ns + si;
  }
  size_t star_index(size_t di, size_t ni, size_t si) const {
    return (di * nn + ni) * ns + si;
  }
};

void mark_record_failed(ExperimentRecord* rec, const std::string& status) {
  rec->risk_star = kNaN;
  rec->risk_priv = kNaN;
  rec->excess_empirical = kNaN;
  rec->excess_population = kNaN;
  rec->generalization_error = kNaN;
  rec->approximation_gap = kNaN;
  rec->population_risk_priv = kNaN;
  rec->total_std_err = kNaN;
  rec->status = status;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& config) {
  validate_config(config);
  ExperimentReport report;
  report.config = config;

  const GridShape shape{config.d_grid.size(), config.n_grid.size(),
                        config.eps_grid.size(),
                        static_cast<size_t>(config.seeds)};
  const bool want_population = config.mc_pairs > 0;

  std::vector<PairwiseLoss> losses;
  losses.reserve(shape.nd);
  for (int d : config.d_grid) {
    losses.push_back(make_loss(config.kind, d, config.lambda, config.bounds));
  }

  // Phase 1: datasets and non-private minimizers, one task per (d, n, seed).
  // Tasks run in parallel; each is single-threaded inside, so the partition
  // of tasks over threads cannot affect any numeric result.
  std::vector<StarSolve> stars(shape.nd * shape.nn * shape.ns);
  parallel_for_blocks(
      static_cast<std::int64_t>(stars.size()), config.threads,
      [&](std::int64_t task) {
        const size_t si = static_cast<size_t>(task) % shape.ns;
        const size_t ni = (static_cast<size_t>(task) / shape.ns) % shape.nn;
        const size_t di = static_cast<size_t>(task) / (shape.ns * shape.nn);
        StarSolve& slot = stars[static_cast<size_t>(task)];
        const int d = config.d_grid[di];
        const int n = config.n_grid[ni];
        slot.data_seed = derive_seed(
            config.master_seed,
            {stream_tag::kData, static_cast<std::uint64_t>(config.kind),
             static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(n),
             static_cast<std::uint64_t>(si)});
        try {
          slot.data.emplace(gen_synthetic(config.kind, n, d, slot.data_seed));
          SolverConfig solver;
          solver.tol = config.solver_tol;
          solver.max_iter = config.solver_max_iter;
          solver.eta = config.eta;
          solver.project_radius = config.project_radius;
          solver.threads = 1;
          MinimizeResult res = exact_minimize(losses[di], *slot.data, solver);
          slot.theta_star = std::move(res.theta.theta);
          slot.risk = res.risk;
          slot.grad_norm = res.grad_norm;
          slot.iterations = res.iterations;
          if (!res.converged) {
            slot.error = "reference minimizer not converged (grad norm " +
                         format_double_shortest(res.grad_norm) + ")";
          }
        } catch (const std::exception& e) {
          slot.error = e.what();
        }
      });

  // Phase 2: one large-sample reference model per d for population excess.
  std::vector<ReferenceSolve> references;
  if (want_population) {
    const int max_n = *std::max_element(config.n_grid.begin(),
                                        config.n_grid.end());
    const int n_ref = static_cast<int>(
        std::llround(config.ref_multiplier * static_cast<double>(max_n)));
    for (size_t di = 0; di < shape.nd; ++di) {
      const int d = config.d_grid[di];
      ReferenceSolve ref;
      ref.d = d;
      ref.n_ref = n_ref;
      try {
        const std::uint64_t ref_seed = derive_seed(
            config.master_seed,
            {stream_tag::kReference, static_cast<std::uint64_t>(config.kind),
             static_cast<std::uint64_t>(d)});
        const Dataset big = gen_synthetic(config.kind, n_ref, d, ref_seed);
        SolverConfig solver;
        solver.tol = config.ref_tol;
        solver.max_iter = config.solver_max_iter;
        solver.eta = config.eta;
        solver.project_radius = config.project_radius;
        solver.threads = config.threads;
        MinimizeResult res = exact_minimize(losses[di], big, solver);
        if (!res.converged) {
          ref.error = "reference model not converged (grad norm " +
                      format_double_shortest(res.grad_norm) + ")";
        } else {
          ref.theta_ref = std::move(res.theta.theta);
          ref.risk = res.risk;
        }
      } catch (const std::exception& e) {
        ref.error = e.what();
      }
      references.push_back(std::move(ref));
      report.reference_d.push_back(d);
      report.reference_n.push_back(n_ref);
      report.reference_risk.push_back(references.back().risk);
    }
  }

  // Phase 3: private training per record. Cells run in parallel; seeds
  // within a cell run in order so the wall-clock budget has one owner.
  report.records.assign(shape.nd * shape.nn * shape.ne * shape.ns,
                        ExperimentRecord{});
  const std::int64_t cells =
      static_cast<std::int64_t>(shape.nd * shape.nn * shape.ne);
  parallel_for_blocks(cells, config.threads, [&](std::int64_t cell) {
    const size_t ei = static_cast<size_t>(cell) % shape.ne;
    const size_t ni = (static_cast<size_t>(cell) / shape.ne) % shape.nn;
    const size_t di = static_cast<size_t>(cell) / (shape.ne * shape.nn);
    const int d = config.d_grid[di];
    const int n = config.n_grid[ni];
    const double eps = config.eps_grid[ei];
    const int p = param_dim_for(config.kind, d);
    const PairwiseLoss& loss = losses[di];

    const auto cell_start = std::chrono::steady_clock::now();
    for (size_t si = 0; si < shape.ns; ++si) {
      ExperimentRecord& rec =
          report.records[shape.record_index(di, ni, ei, si)];
      rec.d = d;
      rec.p = p;
      rec.n = n;
      rec.eps = eps;
      rec.seed_index = static_cast<int>(si);
      rec.runtime_seconds = kNaN;

      const StarSolve& star = stars[shape.star_index(di, ni, si)];
      rec.data_seed = star.data_seed;
      rec.train_seed = derive_seed(
          config.master_seed,
          {kTrainChain, static_cast<std::uint64_t>(config.kind),
           static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(n),
           eps_bits(eps), static_cast<std::uint64_t>(si)});
      rec.mc_seed = derive_seed(
          config.master_seed,
          {stream_tag::kMc, static_cast<std::uint64_t>(config.kind),
           static_cast<std::uint64_t>(d), static_cast<std::uint64_t>(n),
           eps_bits(eps), static_cast<std::uint64_t>(si)});
      rec.T = t_for_cell(config.t_rule, config.t_scale, config.t_fixed, n,
                         eps, p);

      // The first seed of a cell always runs, so every cell contributes at
      // least one attempt and a tiny budget degrades deterministically.
      if (si > 0 && config.cell_budget_seconds > 0.0) {
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          cell_start)
                .count();
        if (elapsed > config.cell_budget_seconds) {
          mark_record_failed(&rec, "budget_exceeded");
          continue;
        }
      }
      if (!star.error.empty()) {
        mark_record_failed(&rec, "error: " + star.error);
        continue;
      }

      const auto rec_start = std::chrono::steady_clock::now();
      try {
        switch (config.sigma_method) {
          case SigmaMethod::kMa:
            rec.sigma = calibrate_sigma_ma(loss.constants().G, rec.T, n,
                                           {eps, config.delta})
                            .sigma;
            break;
          case SigmaMethod::kBasic:
            rec.sigma = calibrate_sigma_basic(loss.constants().G, rec.T, n,
                                              {eps, config.delta})
                            .sigma;
            break;
          case SigmaMethod::kNone:
            rec.sigma = 0.0;
            break;
        }

        TrainConfig train;
        train.T = rec.T;
        train.eta = config.eta;
        train.sigma = rec.sigma;
        train.seed = rec.train_seed;
        train.project_radius = config.project_radius;
        train.init_radius = config.init_radius;
        train.threads = 1;
        const TrainResult trained = dp_pairwise_gd(loss, *star.data, train);

        rec.noise_seed = trained.noise_seed;
        rec.eta = trained.eta;
        rec.risk_star = star.risk;
        rec.risk_priv = trained.final_risk;
        rec.excess_empirical = trained.final_risk - star.risk;
        rec.star_grad_norm = star.grad_norm;
        rec.star_iterations = star.iterations;

        if (want_population) {
          const ReferenceSolve& ref = references[di];
          if (!ref.error.empty()) {
            throw std::runtime_error(ref.error);
          }
          SyntheticSource source(config.kind, d);
          const RiskDecomposition dec = excess_population_risk(
              loss, trained.theta_priv.theta, star.theta_star, ref.theta_ref,
              *star.data, source, config.mc_pairs, rec.mc_seed, 1);
          rec.excess_population = dec.total;
          rec.generalization_error = dec.generalization_error;
          rec.approximation_gap = dec.approximation_gap;
          rec.population_risk_priv = dec.population_risk_priv;
          rec.total_std_err = dec.total_std_err;
        } else {
          rec.excess_population = kNaN;
          rec.generalization_error = kNaN;
          rec.approximation_gap = kNaN;
          rec.population_risk_priv = kNaN;
          rec.total_std_err = kNaN;
        }
        rec.status = "ok";
      } catch (const std::exception& e) {
        mark_record_failed(&rec, std::string("error: ") + e.what());
      }
      if (config.emit_timing) {
        rec.runtime_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                          rec_start)
                .count();
      }
    }
  });

  // Phase 4: per-cell aggregates.
  for (size_t di = 0; di < shape.nd; ++di) {
    for (size_t ni = 0; ni < shape.nn; ++ni) {
      for (size_t ei = 0; ei < shape.ne; ++ei) {
        CellAggregate agg;
        agg.d = config.d_grid[di];
        agg.n = config.n_grid[ni];
        agg.eps = config.eps_grid[ei];
        std::vector<double> emp, pop;
        for (size_t si = 0; si < shape.ns; ++si) {
          const ExperimentRecord& rec =
              report.records[shape.record_index(di, ni, ei, si)];
          if (rec.status == "ok") {
            ++agg.count_ok;
            emp.push_back(rec.excess_empirical);
            if (want_population) pop.push_back(rec.excess_population);
          } else {
            ++agg.count_failed;
          }
        }
        if (!emp.empty()) {
          agg.mean_excess_empirical = mean_of(emp);
          agg.median_excess_empirical = median_of(emp);
          agg.quantile_excess_empirical =
              upper_quantile_of(emp, 1.0 - config.xi);
        } else {
          agg.mean_excess_empirical = kNaN;
          agg.median_excess_empirical = kNaN;
          agg.quantile_excess_empirical = kNaN;
        }
        if (!pop.empty()) {
          agg.mean_excess_population = mean_of(pop);
          agg.median_excess_population = median_of(pop);
          agg.quantile_excess_population =
              upper_quantile_of(pop, 1.0 - config.xi);
        } else {
          agg.mean_excess_population = kNaN;
          agg.median_excess_population = kNaN;
          agg.quantile_excess_population = kNaN;
        }
        report.aggregates.push_back(std::move(agg));
      }
    }
  }

  // Phase 5: scaling fits for every axis with at least 3 grid values.
  std::vector<std::pair<ScalingAxis, size_t>> axes = {
      {ScalingAxis::kN, std::set<int>(config.n_grid.begin(),
                                      config.n_grid.end()).size()},
      {ScalingAxis::kEps, std::set<double>(config.eps_grid.begin(),
                                           config.eps_grid.end()).size()},
      {ScalingAxis::kP, std::set<int>(config.d_grid.begin(),
                                      config.d_grid.end()).size()},
  };
  for (const auto& [axis, count] : axes) {
    if (count < 3) continue;
    report.slopes.push_back(
        scaling_fit(report, axis, ScalingStatistic::kMeanExcessEmpirical));
    if (want_population) {
      report.slopes.push_back(
          scaling_fit(report, axis, ScalingStatistic::kMeanExcessPopulation));
      report.slopes.push_back(scaling_fit(
          report, axis, ScalingStatistic::kQuantileExcessPopulation));
    }
  }
  return report;
}

void fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                   double* slope, double* intercept) {
  if (xs.size() != ys.size()) {
    throw std::invalid_argument("fit_power_law: size mismatch");
  }
  if (xs.size() < 3) {
    throw std::invalid_argument("fit_power_law: needs at least 3 points, got " +
                                std::to_string(xs.size()));
  }
  const size_t m = xs.size();
  double sx = 0.0, sy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw std::invalid_argument("fit_power_law: all values must be positive");
    }
    sx += std::log(xs[i]);
    sy += std::log(ys[i]);
  }
  const double dm = static_cast<double>(m);
  // Centered second pass: the raw-moment denominator n*sxx - sx^2 cancels
  // to roundoff noise instead of zero when all abscissae coincide, so the
  // degeneracy test needs the centered form plus a relative threshold.
  const double mx = sx / dm;
  const double my = sy / dm;
  double cxx = 0.0;
  double cxy = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double dx = std::log(xs[i]) - mx;
    cxx += dx * dx;
    cxy += dx * (std::log(ys[i]) - my);
  }
  const double scale = std::max(1.0, mx * mx) * dm;
  if (!(cxx > 1e-24 * scale)) {
    throw std::invalid_argument("fit_power_law: degenerate x values");
  }
  *slope = cxy / cxx;
  *intercept = my - *slope * mx;
}

namespace {

// Sorted unique grid values with the anchor resolution rule: explicit value
// if configured, otherwise the lower-median grid element.
template <typename T>
T resolve_anchor(std::vector<T> values, T configured) {
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (configured != T{0}) return configured;
  return values[(values.size() - 1) / 2];
}

double record_statistic_value(const ExperimentRecord& rec,
                              ScalingStatistic statistic) {
  return statistic == ScalingStatistic::kMeanExcessEmpirical
             ? rec.excess_empirical
             : rec.excess_population;
}

double aggregate_values(const std::vector<double>& values,
                        ScalingStatistic statistic, double xi) {
  if (statistic == ScalingStatistic::kQuantileExcessPopulation) {
    return upper_quantile_of(values, 1.0 - xi);
  }
  return mean_of(values);
}

}  // namespace

SlopeFit scaling_fit(const ExperimentReport& report, ScalingAxis axis,
                     ScalingStatistic statistic) {
  const ExperimentConfig& config = report.config;
  SlopeFit fit;
  fit.axis = to_string(axis);
  fit.statistic = to_string(statistic);

  // Axis values (sorted unique) and the fixed anchors for the other axes.
  std::vector<double> axis_values;
  if (axis == ScalingAxis::kN) {
    std::set<int> s(config.n_grid.begin(), config.n_grid.end());
    for (int v : s) axis_values.push_back(static_cast<double>(v));
  } else if (axis == ScalingAxis::kEps) {
    std::set<double> s(config.eps_grid.begin(), config.eps_grid.end());
    axis_values.assign(s.begin(), s.end());
  } else {
    std::set<int> s(config.d_grid.begin(), config.d_grid.end());
    for (int v : s) axis_values.push_back(static_cast<double>(v));
  }
  if (axis_values.size() < 3) {
    throw std::invalid_argument("scaling_fit: axis " + fit.axis + " has " +
                                std::to_string(axis_values.size()) +
                                " grid values, needs >= 3");
  }
  if (statistic != ScalingStatistic::kMeanExcessEmpirical &&
      config.mc_pairs <= 0) {
    fit.note = "population statistics unavailable (mc_pairs = 0)";
    return fit;
  }

  const int anchor_n = resolve_anchor(config.n_grid, config.fit_anchor_n);
  const double anchor_eps =
      resolve_anchor(config.eps_grid, config.fit_anchor_eps);
  const int anchor_d = resolve_anchor(config.d_grid, config.fit_anchor_d);

  // Collect the per-seed statistic inputs for each point on the line.
  std::vector<std::vector<double>> per_point;
  for (double av : axis_values) {
    const int want_d = axis == ScalingAxis::kP ? static_cast<int>(av)
                                               : anchor_d;
    const int want_n = axis == ScalingAxis::kN ? static_cast<int>(av)
                                               : anchor_n;
    const double want_eps = axis == ScalingAxis::kEps ? av : anchor_eps;
    std::vector<double> vals;
    for (const ExperimentRecord& rec : report.records) {
      if (rec.d == want_d && rec.n == want_n && rec.eps == want_eps &&
          rec.status == "ok") {
        vals.push_back(record_statistic_value(rec, statistic));
      }
    }
    if (vals.empty()) {
      fit.note = "no successful records at " + fit.axis + " = " +
                 format_double_shortest(av);
      return fit;
    }
    per_point.push_back(std::move(vals));
  }

  fit.xs = axis_values;
  if (axis == ScalingAxis::kP) {
    // The parameter count, not d itself, is the theoretical axis.
    for (double& x : fit.xs) {
      x = static_cast<double>(
          param_dim_for(config.kind, static_cast<int>(x)));
    }
  }
  for (const std::vector<double>& vals : per_point) {
    fit.ys.push_back(aggregate_values(vals, statistic, config.xi));
  }
  for (double y : fit.ys) {
    if (!(y > 0.0) || !std::isfinite(y)) {
      fit.note = "non-positive statistic value on the fit line";
      return fit;
    }
  }
  fit_power_law(fit.xs, fit.ys, &fit.slope, &fit.intercept);

  // Seed bootstrap for the confidence interval: resample seed indices with
  // replacement, recompute each point's statistic, refit.
  constexpr int kBootstrap = 1000;
  Rng rng(derive_seed(config.master_seed,
                      {stream_tag::kBootstrap,
                       static_cast<std::uint64_t>(axis),
                       static_cast<std::uint64_t>(statistic)}));
  std::vector<double> slopes;
  slopes.reserve(kBootstrap);
  std::vector<double> ys(per_point.size());
  for (int b = 0; b < kBootstrap; ++b) {
    bool usable = true;
    for (size_t pt = 0; pt < per_point.size(); ++pt) {
      const std::vector<double>& vals = per_point[pt];
      std::vector<double> resampled(vals.size());
      for (size_t r = 0; r < vals.size(); ++r) {
        resampled[r] = vals[rng.uniform_index(vals.size())];
      }
      ys[pt] = aggregate_values(resampled, statistic, config.xi);
      if (!(ys[pt] > 0.0) || !std::isfinite(ys[pt])) {
        usable = false;
        break;
      }
    }
    if (!usable) continue;
    double s = 0.0, icpt = 0.0;
    fit_power_law(fit.xs, ys, &s, &icpt);
    slopes.push_back(s);
  }
  if (slopes.size() < static_cast<size_t>(kBootstrap / 2)) {
    fit.note = "bootstrap failed on most resamples";
    return fit;
  }
  std::sort(slopes.begin(), slopes.end());
  const auto last = static_cast<double>(slopes.size() - 1);
  fit.ci_lo = slopes[static_cast<size_t>(std::floor(0.025 * last))];
  fit.ci_hi = slopes[static_cast<size_t>(std::ceil(0.975 * last))];
  fit.valid = true;
  return fit;
}

namespace {

void write_experiment_config(JsonWriter* w, const ExperimentConfig& c) {
  w->begin_object();
  w->kv_string("mode", "utility");
  w->kv_string("loss", to_string(c.kind));
  w->kv("lambda", c.lambda);
  w->kv("x_max", c.bounds.x_max);
  w->kv("y_max", c.bounds.y_max);
  w->kv_array_int("d_grid", c.d_grid);
  w->kv_array_int("n_grid", c.n_grid);
  w->kv_array("eps_grid", c.eps_grid);
  w->kv("delta", c.delta);
  w->kv_string("t_rule", to_string(c.t_rule));
  w->kv("t_scale", c.t_scale);
  w->kv_int("t_fixed", c.t_fixed);
  w->kv_int("seeds", c.seeds);
  w->kv_uint("master_seed", c.master_seed);
  w->kv_string("sigma_method", to_string(c.sigma_method));
  w->kv_int("mc_pairs", c.mc_pairs);
  w->kv("ref_multiplier", c.ref_multiplier);
  w->kv("ref_tol", c.ref_tol);
  w->kv("xi", c.xi);
  w->kv("eta", c.eta);
  w->kv("init_radius", c.init_radius);
  w->kv("project_radius", c.project_radius);
  w->kv("solver_tol", c.solver_tol);
  w->kv_int("solver_max_iter", c.solver_max_iter);
  w->kv("cell_budget_seconds", c.cell_budget_seconds);
  w->kv_bool("emit_timing", c.emit_timing);
  w->kv_int("fit_anchor_n", c.fit_anchor_n);
  w->kv("fit_anchor_eps", c.fit_anchor_eps);
  w->kv_int("fit_anchor_d", c.fit_anchor_d);
  // threads is deliberately not echoed: reports must be byte-identical
  // across worker counts.
  w->end_object();
}

void write_record(JsonWriter* w, const ExperimentRecord& r) {
  w->begin_object();
  w->kv_int("d", r.d);
  w->kv_int("p", r.p);
  w->kv_int("n", r.n);
  w->kv("eps", r.eps);
  w->kv_int("seed_index", r.seed_index);
  w->kv_uint("data_seed", r.data_seed);
  w->kv_uint("train_seed", r.train_seed);
  w->kv_uint("noise_seed", r.noise_seed);
  w->kv_uint("mc_seed", r.mc_seed);
  w->kv_int("T", r.T);
  w->kv("sigma", r.sigma);
  w->kv("eta", r.eta);
  w->kv("risk_star", r.risk_star);
  w->kv("risk_priv", r.risk_priv);
  w->kv("excess_empirical", r.excess_empirical);
  w->kv("excess_population", r.excess_population);
  w->kv("generalization_error", r.generalization_error);
  w->kv("approximation_gap", r.approximation_gap);
  w->kv("population_risk_priv", r.population_risk_priv);
  w->kv("total_std_err", r.total_std_err);
  w->kv("star_grad_norm", r.star_grad_norm);
  w->kv_int("star_iterations", r.star_iterations);
  w->kv("runtime_seconds", r.runtime_seconds);
  w->kv_string("status", r.status);
  w->end_object();
}

void write_aggregate(JsonWriter* w, const CellAggregate& a) {
  w->begin_object();
  w->kv_int("d", a.d);
  w->kv_int("n", a.n);
  w->kv("eps", a.eps);
  w->kv_int("count_ok", a.count_ok);
  w->kv_int("count_failed", a.count_failed);
  w->kv("mean_excess_empirical", a.mean_excess_empirical);
  w->kv("median_excess_empirical", a.median_excess_empirical);
  w->kv("quantile_excess_empirical", a.quantile_excess_empirical);
  w->kv("mean_excess_population", a.mean_excess_population);
  w->kv("median_excess_population", a.median_excess_population);
  w->kv("quantile_excess_population", a.quantile_excess_population);
  w->end_object();
}

void write_slope(JsonWriter* w, const SlopeFit& s) {
  w->begin_object();
  w->kv_string("axis", s.axis);
  w->kv_string("statistic", s.statistic);
  w->kv_bool("valid", s.valid);
  w->kv("slope", s.valid ? s.slope : kNaN);
  w->kv("intercept", s.valid ? s.intercept : kNaN);
  w->kv("ci_lo", s.valid ? s.ci_lo : kNaN);
  w->kv("ci_hi", s.valid ? s.ci_hi : kNaN);
  w->kv_array("xs", s.xs);
  w->kv_array("ys", s.ys);
  w->kv_string("note", s.note);
  w->end_object();
}

}  // namespace

std::string report_to_json(const ExperimentReport& report) {
  JsonWriter w;
  w.begin_object();
  w.kv_string("version", kReportVersion);
  w.key("config");
  write_experiment_config(&w, report.config);
  w.key("references");
  w.begin_array();
  for (size_t i = 0; i < report.reference_d.size(); ++i) {
    w.begin_object();
    w.kv_int("d", report.reference_d[i]);
    w.kv_int("n", report.reference_n[i]);
    w.kv("risk", report.reference_risk[i]);
    w.end_object();
  }
  w.end_array();
  w.key("records");
  w.begin_array();
  for (const ExperimentRecord& r : report.records) write_record(&w, r);
  w.end_array();
  w.key("aggregates");
  w.begin_array();
  for (const CellAggregate& a : report.aggregates) write_aggregate(&w, a);
  w.end_array();
  w.key("slopes");
  w.begin_array();
  for (const SlopeFit& s : report.slopes) write_slope(&w, s);
  w.end_array();
  w.end_object();
  return w.str();
}

// ----- Stability experiment -----

void validate_config(const StabilityExperimentConfig& config) {
  if (config.n_grid.empty()) {
    throw std::invalid_argument("stability config: n_grid must be non-empty");
  }
  for (int n : config.n_grid) {
    if (n < 3) {
      throw std::invalid_argument("stability config: n must be >= 3");
    }
  }
  if (config.d < 1 || config.seeds < 1 || config.pairs < 1 ||
      config.replacements < 1 || config.removals < 0) {
    throw std::invalid_argument("stability config: bad probe sizes");
  }
  if (!(config.lambda >= 0.0)) {
    throw std::invalid_argument("stability config: lambda must be >= 0");
  }
}

Dataset make_clustered_dataset(SyntheticKind kind, int n, int d,
                               std::uint64_t seed, bool with_outlier) {
  if (n < 2 || d < 1) {
    throw std::invalid_argument("make_clustered_dataset: need n >= 2, d >= 1");
  }
  constexpr double kClusterRadius = 0.3;
  const Eigen::VectorXd w = synthetic_direction(kind, d);
  Rng rng(derive_seed(seed, {kClusterChain, static_cast<std::uint64_t>(kind),
                             static_cast<std::uint64_t>(n),
                             static_cast<std::uint64_t>(d)}));
  std::vector<Sample> samples;
  samples.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    Sample s;
    s.x = rng.uniform_ball(d, kClusterRadius);
    // Rescale the score so the labels stay as informative as in the
    // unit-ball population.
    const double score = w.dot(s.x) / kClusterRadius;
    if (kind == SyntheticKind::kRanking) {
      s.y = std::min(1.0, std::max(-1.0, score + 0.1 * rng.gaussian()));
    } else {
      s.y = score + 0.05 * rng.gaussian() >= 0.0 ? 1.0 : -1.0;
    }
    samples.push_back(std::move(s));
  }
  if (with_outlier) {
    // A far-out point whose label contradicts the population direction:
    // x = w has score +1, so the clean label would be positive.
    samples[0].x = w;
    samples[0].y = -1.0;
  }
  return Dataset(std::move(samples), Bounds{1.0, 1.0}, seed);
}

StabilityExperimentReport stability_experiment(
    const StabilityExperimentConfig& config) {
  validate_config(config);
  StabilityExperimentReport report;
  report.config = config;

  const PairwiseLoss loss =
      make_loss(config.kind, config.d, config.lambda, Bounds{1.0, 1.0});
  std::vector<std::string> styles{"uniform"};
  if (config.compare_outlier) styles.push_back("outlier");

  const size_t rows =
      styles.size() * config.n_grid.size() * static_cast<size_t>(config.seeds);
  report.rows.assign(rows, StabilityRow{});

  parallel_for_blocks(
      static_cast<std::int64_t>(rows), config.threads, [&](std::int64_t task) {
        const size_t si = static_cast<size_t>(task) %
                          static_cast<size_t>(config.seeds);
        const size_t ni = (static_cast<size_t>(task) /
                           static_cast<size_t>(config.seeds)) %
                          config.n_grid.size();
        const size_t styi = static_cast<size_t>(task) /
                            (static_cast<size_t>(config.seeds) *
                             config.n_grid.size());
        StabilityRow& row = report.rows[static_cast<size_t>(task)];
        row.style = styles[styi];
        row.n = config.n_grid[ni];
        row.seed_index = static_cast<int>(si);
        row.data_seed = derive_seed(
            config.master_seed,
            {stream_tag::kData, styi, static_cast<std::uint64_t>(row.n), si});
        row.probe_seed = derive_seed(
            config.master_seed,
            {stream_tag::kProbe, styi, static_cast<std::uint64_t>(row.n), si});
        try {
          const Dataset data =
              make_clustered_dataset(config.kind, row.n, config.d,
                                     row.data_seed, row.style == "outlier");
          SolverConfig solver;
          solver.tol = config.solver_tol;
          solver.max_iter = config.solver_max_iter;
          solver.threads = 1;
          StabilityProbe probe{config.removals, config.pairs, row.probe_seed};

          const StabilityReport retrain = beta_statistics(
              loss, data, LooMethod::kRetrain, probe, solver);
          row.retrain_beta_uniform = retrain.beta_uniform;
          row.retrain_beta_sup_mean = retrain.beta_sup_mean;
          row.retrain_beta_mean = retrain.beta_mean;
          row.max_delta_norm =
              *std::max_element(retrain.delta_norms.begin(),
                                retrain.delta_norms.end());

          const StabilityReport influence = beta_statistics(
              loss, data, LooMethod::kInfluence, probe, solver);
          row.influence_beta_uniform = influence.beta_uniform;
          row.influence_beta_sup_mean = influence.beta_sup_mean;
          row.influence_beta_mean = influence.beta_mean;

          const DatasetSource source(data);
          const UasEstimate uas = estimate_uas(
              loss, data,
              [&](const Dataset& ds) {
                MinimizeResult res = exact_minimize(loss, ds, solver);
                if (!res.converged) {
                  throw std::runtime_error(
                      "uas trainer did not converge (grad norm " +
                      format_double_shortest(res.grad_norm) + ")");
                }
                return res.theta.theta;
              },
              source, config.replacements,
              derive_seed(row.probe_seed, {stream_tag::kProbe, 2}));
          row.kappa = uas.kappa;
          row.g_kappa = uas.g_kappa;

          row.n_beta_uniform =
              static_cast<double>(row.n) * row.retrain_beta_uniform;
          row.ratio_uniform_to_sup_mean =
              row.retrain_beta_sup_mean > 0.0
                  ? row.retrain_beta_uniform / row.retrain_beta_sup_mean
                  : kNaN;
          row.status = "ok";
        } catch (const std::exception& e) {
          row.retrain_beta_uniform = kNaN;
          row.retrain_beta_sup_mean = kNaN;
          row.retrain_beta_mean = kNaN;
          row.influence_beta_uniform = kNaN;
          row.influence_beta_sup_mean = kNaN;
          row.influence_beta_mean = kNaN;
          row.max_delta_norm = kNaN;
          row.kappa = kNaN;
          row.g_kappa = kNaN;
          row.n_beta_uniform = kNaN;
          row.ratio_uniform_to_sup_mean = kNaN;
          row.status = std::string("error: ") + e.what();
        }
      });

  for (const std::string& style : styles) {
    for (int n : config.n_grid) {
      StabilityCellAggregate agg;
      agg.style = style;
      agg.n = n;
      std::vector<double> bu, bsm, bm, nbu, ratio, kappa, gk;
      for (const StabilityRow& row : report.rows) {
        if (row.style != style || row.n != n) continue;
        if (row.status != "ok") {
          ++agg.count_failed;
          continue;
        }
        ++agg.count_ok;
        bu.push_back(row.retrain_beta_uniform);
        bsm.push_back(row.retrain_beta_sup_mean);
        bm.push_back(row.retrain_beta_mean);
        nbu.push_back(row.n_beta_uniform);
        ratio.push_back(row.ratio_uniform_to_sup_mean);
        kappa.push_back(row.kappa);
        gk.push_back(row.g_kappa);
      }
      if (agg.count_ok > 0) {
        agg.median_beta_uniform = median_of(bu);
        agg.median_beta_sup_mean = median_of(bsm);
        agg.median_beta_mean = median_of(bm);
        agg.median_n_beta_uniform = median_of(nbu);
        agg.median_ratio = median_of(ratio);
        agg.median_kappa = median_of(kappa);
        agg.median_g_kappa = median_of(gk);
      } else {
        agg.median_beta_uniform = kNaN;
        agg.median_beta_sup_mean = kNaN;
        agg.median_beta_mean = kNaN;
        agg.median_n_beta_uniform = kNaN;
        agg.median_ratio = kNaN;
        agg.median_kappa = kNaN;
        agg.median_g_kappa = kNaN;
      }
      report.aggregates.push_back(std::move(agg));
    }
  }
  return report;
}

std::string report_to_json(const StabilityExperimentReport& report) {
  const StabilityExperimentConfig& c = report.config;
  JsonWriter w;
  w.begin_object();
  w.kv_string("version", kReportVersion);
  w.key("config");
  w.begin_object();
  w.kv_string("mode", "stability");
  w.kv_string("loss", to_string(c.kind));
  w.kv("lambda", c.lambda);
  w.kv_int("d", c.d);
  w.kv_array_int("n_grid", c.n_grid);
  w.kv_int("seeds", c.seeds);
  w.kv_uint("master_seed", c.master_seed);
  w.kv_int("removals", c.removals);
  w.kv_int("pairs", c.pairs);
  w.kv_int("replacements", c.replacements);
  w.kv_bool("compare_outlier", c.compare_outlier);
  w.kv("solver_tol", c.solver_tol);
  w.kv_int("solver_max_iter", c.solver_max_iter);
  w.end_object();
  w.key("records");
  w.begin_array();
  for (const StabilityRow& row : report.rows) {
    w.begin_object();
    w.kv_string("style", row.style);
    w.kv_int("n", row.n);
    w.kv_int("seed_index", row.seed_index);
    w.kv_uint("data_seed", row.data_seed);
    w.kv_uint("probe_seed", row.probe_seed);
    w.kv("retrain_beta_uniform", row.retrain_beta_uniform);
    w.kv("retrain_beta_sup_mean", row.retrain_beta_sup_mean);
    w.kv("retrain_beta_mean", row.retrain_beta_mean);
    w.kv("influence_beta_uniform", row.influence_beta_uniform);
    w.kv("influence_beta_sup_mean", row.influence_beta_sup_mean);
    w.kv("influence_beta_mean", row.influence_beta_mean);
    w.kv("max_delta_norm", row.max_delta_norm);
    w.kv("kappa", row.kappa);
    w.kv("g_kappa", row.g_kappa);
    w.kv("n_beta_uniform", row.n_beta_uniform);
    w.kv("ratio_uniform_to_sup_mean", row.ratio_uniform_to_sup_mean);
    w.kv_string("status", row.status);
    w.end_object();
  }
  w.end_array();
  w.key("aggregates");
  w.begin_array();
  for (const StabilityCellAggregate& a : report.aggregates) {
    w.begin_object();
    w.kv_string("style", a.style);
    w.kv_int("n", a.n);
    w.kv_int("count_ok", a.count_ok);
    w.kv_int("count_failed", a.count_failed);
    w.kv("median_beta_uniform", a.median_beta_uniform);
    w.kv("median_beta_sup_mean", a.median_beta_sup_mean);
    w.kv("median_beta_mean", a.median_beta_mean);
    w.kv("median_n_beta_uniform", a.median_n_beta_uniform);
    w.kv("median_ratio", a.median_ratio);
    w.kv("median_kappa", a.median_kappa);
    w.kv("median_g_kappa", a.median_g_kappa);
    w.end_object();
  }
  w.end_array();
  w.key("slopes");
  w.begin_array();
  w.end_array();
  w.end_object();
  return w.str();
}

// ----- Config files -----

namespace {

using nlohmann::json;

void check_known_keys(const json& j, const std::set<std::string>& allowed,
                      const std::string& path) {
  for (const auto& item : j.items()) {
    if (allowed.find(item.key()) == allowed.end()) {
      throw ParseError(path + ": unknown config key \"" + item.key() + "\"");
    }
  }
}

template <typename T>
void read_if(const json& j, const char* key, T* out) {
  if (j.contains(key)) {
    *out = j.at(key).get<T>();
  }
}

}  // namespace

ParsedConfig config_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open config file: " + path);
  }
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  if (!j.is_object()) {
    throw ParseError(path + ": config must be a JSON object");
  }

  ParsedConfig parsed;
  std::string mode = "utility";
  read_if(j, "mode", &mode);

  try {
    if (mode == "utility") {
      check_known_keys(
          j,
          {"mode", "loss", "lambda", "x_max", "y_max", "d", "d_grid", "n_grid",
           "eps_grid", "delta", "t_rule", "t_scale", "t_fixed", "seeds",
           "master_seed", "sigma_method", "mc_pairs", "ref_multiplier",
           "ref_tol", "xi", "eta", "init_radius", "project_radius",
           "solver_tol", "solver_max_iter", "threads", "cell_budget_seconds",
           "emit_timing", "fit_anchor_n", "fit_anchor_eps", "fit_anchor_d"},
          path);
      ExperimentConfig& c = parsed.utility;
      std::string loss = to_string(c.kind);
      read_if(j, "loss", &loss);
      c.kind = synthetic_kind_from_string(loss);
      read_if(j, "lambda", &c.lambda);
      read_if(j, "x_max", &c.bounds.x_max);
      read_if(j, "y_max", &c.bounds.y_max);
      if (j.contains("d")) {
        c.d_grid = {j.at("d").get<int>()};
      }
      read_if(j, "d_grid", &c.d_grid);
      read_if(j, "n_grid", &c.n_grid);
      read_if(j, "eps_grid", &c.eps_grid);
      read_if(j, "delta", &c.delta);
      std::string t_rule = to_string(c.t_rule);
      read_if(j, "t_rule", &t_rule);
      c.t_rule = t_rule_from_string(t_rule);
      read_if(j, "t_scale", &c.t_scale);
      read_if(j, "t_fixed", &c.t_fixed);
      read_if(j, "seeds", &c.seeds);
      read_if(j, "master_seed", &c.master_seed);
      std::string sigma_method = to_string(c.sigma_method);
      read_if(j, "sigma_method", &sigma_method);
      c.sigma_method = sigma_method_from_string(sigma_method);
      read_if(j, "mc_pairs", &c.mc_pairs);
      read_if(j, "ref_multiplier", &c.ref_multiplier);
      read_if(j, "ref_tol", &c.ref_tol);
      read_if(j, "xi", &c.xi);
      read_if(j, "eta", &c.eta);
      read_if(j, "init_radius", &c.init_radius);
      read_if(j, "project_radius", &c.project_radius);
      read_if(j, "solver_tol", &c.solver_tol);
      read_if(j, "solver_max_iter", &c.solver_max_iter);
      read_if(j, "threads", &c.threads);
      read_if(j, "cell_budget_seconds", &c.cell_budget_seconds);
      read_if(j, "emit_timing", &c.emit_timing);
      read_if(j, "fit_anchor_n", &c.fit_anchor_n);
      read_if(j, "fit_anchor_eps", &c.fit_anchor_eps);
      read_if(j, "fit_anchor_d", &c.fit_anchor_d);
      validate_config(c);
    } else if (mode == "stability") {
      parsed.is_stability = true;
      check_known_keys(
          j,
          {"mode", "loss", "lambda", "d", "n_grid", "seeds", "master_seed",
           "removals", "pairs", "replacements", "compare_outlier",
           "solver_tol", "solver_max_iter", "threads"},
          path);
      StabilityExperimentConfig& c = parsed.stability;
      std::string loss = to_string(c.kind);
      read_if(j, "loss", &loss);
      c.kind = synthetic_kind_from_string(loss);
      read_if(j, "lambda", &c.lambda);
      read_if(j, "d", &c.d);
      read_if(j, "n_grid", &c.n_grid);
      read_if(j, "seeds", &c.seeds);
      read_if(j, "master_seed", &c.master_seed);
      read_if(j, "removals", &c.removals);
      read_if(j, "pairs", &c.pairs);
      read_if(j, "replacements", &c.replacements);
      read_if(j, "compare_outlier", &c.compare_outlier);
      read_if(j, "solver_tol", &c.solver_tol);
      read_if(j, "solver_max_iter", &c.solver_max_iter);
      read_if(j, "threads", &c.threads);
      validate_config(c);
    } else {
      throw ParseError(path + ": unknown mode \"" + mode + "\"");
    }
  } catch (const json::exception& e) {
    throw ParseError(path + ": " + e.what());
  }
  return parsed;
}

}  // namespace pairdp
