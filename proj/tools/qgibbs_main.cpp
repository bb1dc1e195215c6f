// Copyright 2026 The qgibbs Authors
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
//
// Command-line driver: scaling-exponent sweeps, partition-function
// estimation, preparation diagnostics, and the bound verification suite.
// Exit codes: 0 success, 2 configuration error, 3 assertion or bound
// violation.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "qgibbs/serialization.hpp"

namespace {

using namespace qgibbs;

struct CommonArgs {
  std::string config_path;
  std::uint64_t seed = 1;
  std::string out_path;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "model config JSON path");
  cmd->add_option("--seed", args->seed, "master seed");
  cmd->add_option("--out", args->out_path, "output path (default stdout)");
  cmd->add_option("--format", args->format, "csv|json")
      ->check(CLI::IsMember({"csv", "json"}));
}

ModelConfig load_model_config(const CommonArgs& args,
                              const ModelConfig& fallback) {
  if (args.config_path.empty()) return fallback;
  std::ifstream in(args.config_path);
  if (!in) throw config_error("cannot open config file: " + args.config_path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error(std::string("config parse failure: ") + e.what());
  }
  return model_config_from_json(j);
}

void emit(const CommonArgs& args, const std::string& payload) {
  if (args.out_path.empty()) {
    std::cout << payload;
    return;
  }
  std::ofstream out(args.out_path, std::ios::binary);
  if (!out) throw config_error("cannot open output path: " + args.out_path);
  out << payload;
}

int cmd_figure1(const CommonArgs& args, const std::string& beta_grid,
                const std::vector<double>& ratios) {
  ModelConfig base;
  base.n = 10;
  base.boundary = Boundary::kPeriodic;
  base.shift_policy = ShiftPolicy::kExactGround;
  ModelConfig cfg = load_model_config(args, base);

  const std::vector<double> betas = parse_beta_grid(beta_grid);
  // The two members of a dual coupling pair share one spectrum up to the
  // overall normalization; sweep the canonical representative once.
  std::map<double, EigenSystem> cache;
  std::vector<FigureRow> rows;
  for (double r : ratios) {
    if (!(r > 0.0)) throw config_error("field ratios must be positive");
    const double canon = canonical_field_ratio(r);
    auto it = cache.find(canon);
    if (it == cache.end()) {
      ModelConfig mc = cfg;
      mc.g_over_j = canon;
      const LocalHamiltonian h = build_model(mc);
      it = cache.emplace(canon, eigendecompose(h)).first;
    }
    for (double beta : betas) {
      const ThermalPoint p = scaling_exponent(it->second, beta, cfg.n);
      rows.push_back({r, beta, p.alpha});
    }
  }
  if (args.format == "csv") {
    emit(args, figure_csv(std::move(rows)));
  } else {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "figure1";
    j["rows"] = json::array();
    std::sort(rows.begin(), rows.end(),
              [](const FigureRow& a, const FigureRow& b) {
                if (a.g_over_j != b.g_over_j) return a.g_over_j < b.g_over_j;
                return a.beta < b.beta;
              });
    for (const FigureRow& r : rows)
      j["rows"].push_back({{"g_over_J", r.g_over_j},
                           {"beta", r.beta},
                           {"alpha", r.alpha}});
    emit(args, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_estimate(const CommonArgs& args, const std::string& beta_grid,
                 double eps, double confidence, const std::string& mode_name,
                 const std::string& counting_name,
                 const std::string& z_source_name) {
  ModelConfig base;
  base.n = 3;
  base.g_over_j = 1.0;
  ModelConfig cfg = load_model_config(args, base);

  EstimateMode mode;
  if (mode_name == "universal")
    mode = EstimateMode::kUniversal;
  else if (mode_name == "classical")
    mode = EstimateMode::kClassical;
  else if (mode_name == "supplied")
    mode = EstimateMode::kSupplied;
  else
    throw config_error("mode must be universal, classical, or supplied");

  EstimateOptions opt;
  opt.counting = counting_name == "analytic" ? CountingMode::kAnalytic
                                             : CountingMode::kSampled;
  opt.z_source =
      z_source_name == "oracle" ? ZSource::kOracle : ZSource::kProvided;

  const LocalHamiltonian h = build_model(cfg);
  std::optional<EigenSystem> eig;
  if (h.dim() <= h.dense_limit) eig = eigendecompose(h);
  if (mode == EstimateMode::kSupplied) {
    if (!eig) throw config_error("supplied mode needs the dense eigensystem");
    opt.bath_dim = 1;
    opt.supplied_unitary = MatrixC::Identity(
        static_cast<Eigen::Index>(h.dim()), static_cast<Eigen::Index>(h.dim()));
  }

  const std::vector<double> betas = parse_beta_grid(beta_grid);
  std::vector<EstimateReport> reports;
  std::vector<std::optional<double>> oracle;
  for (std::size_t i = 0; i < betas.size(); ++i) {
    opt.seed = mix_seed(args.seed, i);
    EstimateReport rep;
    if (mode == EstimateMode::kClassical) {
      rep = estimate_partition(h, betas[i], eps, confidence, mode, opt);
    } else {
      if (!eig) throw config_error("model exceeds the dense oracle limit");
      rep = estimate_partition(*eig, betas[i], eps, confidence, mode, opt);
    }
    reports.push_back(rep);
    if (eig)
      oracle.push_back(partition_function(*eig, betas[i]));
    else
      oracle.push_back(std::nullopt);
  }

  if (args.format == "csv") {
    emit(args, estimate_csv(reports, oracle));
  } else {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = "estimate";
    j["seed"] = args.seed;
    j["model"] = model_config_to_json(cfg);
    j["mode"] = mode_name;
    j["reports"] = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i)
      j["reports"].push_back(to_json(reports[i], oracle[i]));
    emit(args, j.dump(2) + "\n");
  }
  return 0;
}

int cmd_prepare(const CommonArgs& args, double beta, double eps,
                int m_override, int eta_override,
                const std::string& amplifier_name) {
  ModelConfig base;
  base.n = 2;
  base.g_over_j = 1.0;
  base.boundary = Boundary::kOpen;
  ModelConfig cfg = load_model_config(args, base);

  PrepOptions opt;
  opt.amplifier = amplifier_name == "grover" ? Amplifier::kGrover
                                             : Amplifier::kFixedPoint;
  opt.z_source = ZSource::kOracle;
  if (m_override > 0) opt.m_override = m_override;
  if (eta_override > 0) opt.eta_override = eta_override;

  const LocalHamiltonian h = build_model(cfg);
  const EigenSystem eig = eigendecompose(h);
  const PurifiedGibbs pg = prepare_purified_gibbs(eig, beta, eps, opt);

  const MatrixC reduced = reduced_system_state(pg.state, eig.vectors);
  const double fid = fidelity(reduced, gibbs_state(eig, beta));
  const CoolingSchedule sched =
      make_schedule(beta, eig.emax, SchedulePolicy::kUniform);
  const double t = kPi / (4.0 * eig.emax);

  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "prepare";
  j["seed"] = args.seed;
  j["model"] = model_config_to_json(cfg);
  j["beta"] = beta;
  j["eps"] = eps;
  j["ell"] = sched.ell;
  j["betas"] = sched.betas;
  j["m"] = m_override > 0
               ? m_override
               : (sched.ell == 0 ? 0 : prep_energy_bits(beta, sched.ell, t, eps));
  j["eta"] = eta_override > 0
                 ? eta_override
                 : (sched.ell == 0 ? 0 : prep_eta(beta, eig.emax, sched.ell, eps));
  j["badmass_bound"] = pg.badmass_bound;
  j["residual"] = pg.residual;
  j["fidelity_oracle"] = fid;
  j["cost"] = to_json(pg.cost);
  j["thermalization_cost_model"] =
      sched.ell == 0 ? 0.0
                     : thermalization_cost(
                           beta, eig.emax,
                           eps / static_cast<double>(sched.ell),
                           static_cast<double>(eig.dim()),
                           partition_function(eig, beta));
  emit(args, j.dump(2) + "\n");
  return 0;
}

int cmd_verify_bounds(const CommonArgs& args, std::size_t trials,
                      std::size_t dim, double radius) {
  BoundReport report;
  if (trials > 0) report = run_all_bound_checks(trials, dim, args.seed, radius);
  json j = to_json(report);
  j["command"] = "verify-bounds";
  j["seed"] = args.seed;
  j["trials"] = trials;
  j["dim"] = dim;
  emit(args, j.dump(2) + "\n");
  return report.all_pass() ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-state simulator and partition-function estimator"};
  app.require_subcommand(1);

  CommonArgs fig_args, est_args, prep_args, bounds_args;
  std::string fig_grid = "0:3:61";
  std::vector<double> fig_ratios = {0.5, 1.0, 2.0};
  CLI::App* fig = app.add_subcommand(
      "figure1", "scaling exponent sweep over field ratios");
  add_common(fig, &fig_args);
  fig_args.format = "csv";
  fig->add_option("--beta-grid", fig_grid, "a:b:steps");
  fig->add_option("--ratios", fig_ratios, "field ratios g/J");

  std::string est_grid = "1:1:1";
  double est_eps = 0.1, est_conf = 0.9;
  std::string est_mode = "universal", est_counting = "sampled",
              est_zsource = "self";
  CLI::App* est =
      app.add_subcommand("estimate", "telescoping partition estimate");
  add_common(est, &est_args);
  est->add_option("--beta-grid", est_grid, "a:b:steps");
  est->add_option("--eps", est_eps, "relative error target");
  est->add_option("--confidence", est_conf, "per-estimate success target");
  est->add_option("--mode", est_mode, "universal|classical|supplied")
      ->check(CLI::IsMember({"universal", "classical", "supplied"}));
  est->add_option("--counting", est_counting, "sampled|analytic")
      ->check(CLI::IsMember({"sampled", "analytic"}));
  est->add_option("--z-source", est_zsource, "self|oracle")
      ->check(CLI::IsMember({"self", "oracle"}));

  double prep_beta = 1.0, prep_eps = 0.1;
  int prep_m = 0, prep_eta = 0;
  std::string prep_amp = "fixed_point";
  CLI::App* prep =
      app.add_subcommand("prepare", "thermal preparation diagnostics");
  add_common(prep, &prep_args);
  prep->add_option("--beta", prep_beta, "inverse temperature");
  prep->add_option("--eps", prep_eps, "accuracy target");
  prep->add_option("--m", prep_m, "energy bits override");
  prep->add_option("--eta", prep_eta, "median repetitions override");
  prep->add_option("--amplifier", prep_amp, "grover|fixed_point")
      ->check(CLI::IsMember({"grover", "fixed_point"}));

  std::size_t bounds_trials = 200, bounds_dim = 8;
  double bounds_radius = 2.0;
  CLI::App* bounds =
      app.add_subcommand("verify-bounds", "perturbation bound suite");
  add_common(bounds, &bounds_args);
  bounds->add_option("--trials", bounds_trials, "ensemble size per check");
  bounds->add_option("--dim", bounds_dim, "matrix dimension");
  bounds->add_option("--radius", bounds_radius, "outer contour radius");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (fig->parsed()) return cmd_figure1(fig_args, fig_grid, fig_ratios);
    if (est->parsed())
      return cmd_estimate(est_args, est_grid, est_eps, est_conf, est_mode,
                          est_counting, est_zsource);
    if (prep->parsed())
      return cmd_prepare(prep_args, prep_beta, prep_eps, prep_m, prep_eta,
                         prep_amp);
    if (bounds->parsed())
      return cmd_verify_bounds(bounds_args, bounds_trials, bounds_dim,
                               bounds_radius);
  } catch (const qgibbs::config_error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const qgibbs::invariant_violation& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
