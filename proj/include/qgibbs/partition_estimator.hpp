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
// Partition function estimation: quantum counting of thermal ratio states,
// the telescoping product over the cooling schedule, the diagonal fast
// path, and the supplied-process front end.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "qgibbs/gibbs_prep.hpp"

namespace qgibbs {

// -------------------------------------------------------------------------
// Two-dimensional invariant block of the counting walk

struct GroverBlock {
  double theta = 0.0;   // rotation half-angle, sin^2(theta) = target weight
  double weight = 0.0;  // squared norm of the flag-0 component
  bool empty = false;   // no target mass: the walk acts by a bare reflection
  bool full = false;    // all mass on target
};

// Rotation angle of the invariant block of the product of the two counting
// reflections, determined by the flag-0 weight of the supplied state.
inline GroverBlock grover_operator_block(const CompressedState& phi,
                                         double tol = 1e-12) {
  const double n2 = phi.squared_norm();
  if (std::abs(n2 - 1.0) > 1e-9)
    throw std::invalid_argument("counting expects a unit-norm state");
  GroverBlock blk;
  blk.weight = std::min(1.0, std::max(0.0, phi.flag_weight(0, 0)));
  blk.empty = blk.weight <= tol;
  blk.full = blk.weight >= 1.0 - tol;
  blk.theta = std::asin(std::sqrt(blk.weight));
  return blk;
}

// -------------------------------------------------------------------------
// Counting a single ratio

enum class CountingMode { kAnalytic, kSampled };

struct CountResult {
  double f_hat = 0.0;
  double uses = 0.0;  // preparations of the counted state consumed
  int register_bits = 0;
  int repetitions = 0;
};

// Register size: phase resolution pi/2^b translates to an F error of at
// most precision when 2^b >= 5*pi/precision.
inline int counting_register_bits(double precision) {
  return std::max(
      3, static_cast<int>(std::ceil(std::log2(5.0 * kPi / precision))));
}

inline int counting_repetitions(double confidence) {
  return 8 * static_cast<int>(
                 std::ceil(std::log(1.0 / (1.0 - confidence))));
}

// Estimates sin^2(theta) by phase estimation on the counting walk. The two
// invariant-block eigenphases sit at fractions 1/2 +- theta/pi of a turn;
// each repetition samples one register outcome from the exact mixture law
// and the lower median over repetitions is returned.
inline CountResult count_ratio_angle(double theta, double precision,
                                     double confidence, std::uint64_t seed,
                                     CountingMode mode) {
  if (!(precision > 0.0) || precision >= 1.0)
    throw config_error("counting precision must lie in (0,1)");
  if (!(confidence > 0.0) || confidence >= 1.0)
    throw config_error("confidence must lie in (0,1)");
  CountResult res;
  if (mode == CountingMode::kAnalytic) {
    res.f_hat = std::pow(std::sin(theta), 2);
    return res;
  }
  const int b = counting_register_bits(precision);
  const std::size_t grid = std::size_t{1} << b;
  const double phi_plus = 0.5 + theta / kPi;
  const double phi_minus = 0.5 - theta / kPi;
  std::vector<double> pmf(grid);
  for (std::size_t j = 0; j < grid; ++j)
    pmf[j] = 0.5 * kernel_prob_phase(j, phi_plus, b) +
             0.5 * kernel_prob_phase(j, phi_minus, b);

  const int reps = counting_repetitions(confidence);
  std::vector<double> estimates;
  estimates.reserve(static_cast<std::size_t>(reps));
  for (int rep = 0; rep < reps; ++rep) {
    auto rng = make_rng(mix_seed(seed, static_cast<std::uint64_t>(rep)));
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    const double u = unif(rng);
    double acc = 0.0;
    std::size_t outcome = grid - 1;
    for (std::size_t j = 0; j < grid; ++j) {
      acc += pmf[j];
      if (u <= acc) {
        outcome = j;
        break;
      }
    }
    const double angle = kPi * static_cast<double>(outcome) /
                         static_cast<double>(grid);
    estimates.push_back(std::pow(std::cos(angle), 2));
  }
  std::sort(estimates.begin(), estimates.end());
  res.f_hat = estimates[static_cast<std::size_t>((reps + 1) / 2 - 1)];
  res.register_bits = b;
  res.repetitions = reps;
  res.uses = static_cast<double>(reps) * static_cast<double>(grid);
  return res;
}

inline CountResult count_ratio(const CompressedState& phi, double precision,
                               double confidence, std::uint64_t seed,
                               CountingMode mode = CountingMode::kSampled) {
  const GroverBlock blk = grover_operator_block(phi);
  return count_ratio_angle(blk.theta, precision, confidence, seed, mode);
}

// -------------------------------------------------------------------------
// Estimate report

struct RatioEntry {
  double beta_k = 0.0;
  double beta_next = 0.0;
  double f_hat = 0.0;
  double precision = 0.0;
  double uses = 0.0;
};

struct EstimateReport {
  double beta = 0.0;
  double z_hat = 0.0;
  double rel_err_target = 0.0;
  double confidence = 0.0;
  std::vector<RatioEntry> ratios;
  CostCounters cost;
  double shift_factor = 1.0;  // e^{-beta * shift}; never folded into z_hat
  std::size_t system_dim = 0;
  std::size_t ell = 0;
  std::uint64_t seed = 0;
};

enum class EstimateMode { kUniversal, kClassical, kSupplied };

struct EstimateOptions {
  CountingMode counting = CountingMode::kSampled;
  Amplifier amplifier = Amplifier::kFixedPoint;
  // Self-hosted: q at step k+1 is sized by the running product of counted
  // ratios. Oracle-z isolates state-preparation errors.
  ZSource z_source = ZSource::kProvided;
  int padding = 4;
  std::optional<int> m_override;
  std::optional<int> eta_override;
  bool per_step_sizing = true;
  std::uint64_t seed = 1;
  // Supplied mode: external unitary acting on system (x) bath.
  MatrixC supplied_unitary;
  std::size_t bath_dim = 0;
};

namespace detail {

// Supplied-process start: the system half of a maximally entangled pair
// and a |0> bath are pushed through the external unitary, re-expressed in
// the interaction eigenbasis. Environment rows enumerate (scratch, bath)
// and are not mutually orthogonal in general.
inline CompressedState supplied_initial_state(const EigenSystem& eig,
                                              const MatrixC& v,
                                              std::size_t bath_dim,
                                              const QPEConfig& cfg) {
  const std::size_t d = eig.dim();
  if (bath_dim < 1) throw config_error("bath dimension must be positive");
  const auto vd = static_cast<Eigen::Index>(d * bath_dim);
  if (v.rows() != vd || v.cols() != vd)
    throw config_error("supplied unitary must act on system x bath");
  if ((v.adjoint() * v - MatrixC::Identity(vd, vd)).norm() > 1e-9 * double(vd))
    throw config_error("supplied process must be unitary");
  CompressedState st(layout_for(cfg, d), d * bath_dim);
  st.orthogonal_rows = false;
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t x = 0; x < d; ++x)
      for (std::size_t b = 0; b < bath_dim; ++b) {
        cplx amp(0.0, 0.0);
        for (std::size_t y = 0; y < d; ++y) {
          const cplx basis = std::conj(
              eig.vectors(static_cast<Eigen::Index>(y),
                          static_cast<Eigen::Index>(a)));
          amp += basis * v(static_cast<Eigen::Index>(y * bath_dim + b),
                           static_cast<Eigen::Index>(x * bath_dim + 0));
        }
        st.at(a, x * bath_dim + b, 0, 0) = scale * amp;
      }
  return st;
}

inline bool is_diagonal_hamiltonian(const LocalHamiltonian& h) {
  const MatrixC dense = dense_matrix(h);
  double off = 0.0;
  for (Eigen::Index i = 0; i < dense.rows(); ++i)
    for (Eigen::Index j = 0; j < dense.cols(); ++j)
      if (i != j) off = std::max(off, std::abs(dense(i, j)));
  return off < 1e-12;
}

}  // namespace detail

// Exact thermal ratio sum over explicitly known energies, factored around
// the smallest energy for stability.
inline double diagonal_ratio(const std::vector<double>& energies,
                             double beta_k, double delta) {
  const double e0 = *std::min_element(energies.begin(), energies.end());
  double num = 0.0, den = 0.0;
  for (double e : energies) {
    const double w = std::exp(-beta_k * (e - e0));
    num += w * std::exp(-delta * (e - e0));
    den += w;
  }
  return (num / den) * std::exp(-delta * e0);
}

// Full telescoping estimate of the partition function at the requested
// inverse temperature. Universal mode runs the thermalization pipeline per
// schedule step; classical mode exploits exactly computable configuration
// energies and skips phase estimation entirely; supplied mode front-loads
// the external process before marking.
inline EstimateReport estimate_partition(const EigenSystem& eig, double beta,
                                         double eps, double confidence,
                                         EstimateMode mode,
                                         const EstimateOptions& opt = {}) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw config_error("relative error target must lie in (0,1)");
  if (!(confidence > 0.0) || confidence >= 1.0)
    throw config_error("confidence must lie in (0,1)");
  if (beta < 0.0) throw config_error("beta must be nonnegative");
  if (mode == EstimateMode::kClassical)
    throw config_error("classical mode requires the interaction terms");

  EstimateReport rep;
  rep.beta = beta;
  rep.rel_err_target = eps;
  rep.confidence = confidence;
  rep.system_dim = eig.dim();
  rep.shift_factor = std::exp(-beta * eig.shift);
  rep.seed = opt.seed;

  const double d = static_cast<double>(eig.dim());
  const double t = kPi / (4.0 * eig.emax);
  const CoolingSchedule sched =
      make_schedule(beta, eig.emax, SchedulePolicy::kUniform);
  rep.ell = sched.ell;
  if (sched.ell == 0) {
    rep.z_hat = d;
    return rep;
  }
  const double prec = eps / static_cast<double>(sched.ell);

  double z_run = d;
  for (std::size_t k = 0; k < sched.ell; ++k) {
    const double beta_k = sched.betas[k];
    const double beta_next = sched.betas[k + 1];
    const int m_k =
        opt.m_override.value_or(prep_energy_bits(
            opt.per_step_sizing ? beta_next : beta, sched.ell, t, eps));
    const int eta_k =
        opt.eta_override.value_or(prep_eta(
            opt.per_step_sizing ? beta_k : beta, eig.emax, sched.ell, eps));
    const QPEConfig cfg = make_qpe_config(eig.emax, m_k, eta_k, opt.padding);

    PurifiedGibbs pg;
    if (mode == EstimateMode::kSupplied) {
      pg.state = detail::supplied_initial_state(eig, opt.supplied_unitary,
                                                opt.bath_dim, cfg);
      median_qpe(pg.state, eig.energies, cfg);
      pg.cost.u_applications =
          static_cast<double>(cfg.eta) *
          (static_cast<double>(cfg.grid_size()) - 1.0);
      pg.cost.qpe_invocations = static_cast<double>(cfg.eta);
      pg.cost.state_preparations = 1.0;
      pg.cost.thermalizer_invocations = 1.0;
      if (beta_k > 0.0) {
        conditional_rotation(pg.state, beta_k, 0);
        double z_for_q = z_run;
        if (opt.z_source == ZSource::kOracle)
          z_for_q = partition_function(eig, beta_k);
        const double delta = eps / static_cast<double>(sched.ell);
        FixedPointResult fr = fixed_point_amplify(pg.state, delta);
        (void)z_for_q;
        pg.cost.scale(fr.preparations);
        pg.residual = 1.0 - fr.final_weight;
        project_flag_zero(pg.state);
      }
      pg.beta = beta_k;
    } else if (beta_k == 0.0) {
      pg = prepare_infinite_temperature(eig, cfg);
    } else {
      PrepOptions popt;
      popt.amplifier = opt.amplifier;
      popt.padding = opt.padding;
      popt.m_override = m_k;
      popt.eta_override = eta_k;
      if (opt.z_source == ZSource::kOracle) {
        popt.z_source = ZSource::kOracle;
      } else {
        popt.z_source = ZSource::kProvided;
        popt.z_provided = std::max(z_run, 1e-300);
      }
      pg = prepare_purified_gibbs(eig, beta_k, eps, popt);
      project_flag_zero(pg.state);
    }

    CompressedState phi = step_rotate(pg, beta_next);
    const CountResult cr = count_ratio(phi, prec, confidence,
                                       mix_seed(opt.seed, k), opt.counting);
    const double f_hat = std::min(1.0, std::max(cr.f_hat, 1e-12));
    z_run *= f_hat;

    RatioEntry entry;
    entry.beta_k = beta_k;
    entry.beta_next = beta_next;
    entry.f_hat = f_hat;
    entry.precision = prec;
    entry.uses = cr.uses;
    rep.ratios.push_back(entry);

    rep.cost.counting_uses += cr.uses;
    CostCounters prep_cost = pg.cost;
    prep_cost.scale(1.0 + cr.uses);
    prep_cost.counting_uses = 0.0;
    prep_cost.thermalizer_invocations =
        pg.cost.thermalizer_invocations * (1.0 + cr.uses);
    rep.cost += prep_cost;
  }
  rep.z_hat = z_run;
  return rep;
}

inline EstimateReport estimate_partition(const LocalHamiltonian& h,
                                         double beta, double eps,
                                         double confidence, EstimateMode mode,
                                         const EstimateOptions& opt = {}) {
  if (mode == EstimateMode::kClassical) {
    if (!detail::is_diagonal_hamiltonian(h))
      throw config_error(
          "classical mode requires configuration-diagonal interactions");
    if (!(eps > 0.0) || eps >= 1.0)
      throw config_error("relative error target must lie in (0,1)");
    if (!(confidence > 0.0) || confidence >= 1.0)
      throw config_error("confidence must lie in (0,1)");
    if (beta < 0.0) throw config_error("beta must be nonnegative");

    const MatrixC dense = dense_matrix(h);
    std::vector<double> energies;
    energies.reserve(h.dim());
    for (Eigen::Index i = 0; i < dense.rows(); ++i)
      energies.push_back(dense(i, i).real());

    EstimateReport rep;
    rep.beta = beta;
    rep.rel_err_target = eps;
    rep.confidence = confidence;
    rep.system_dim = h.dim();
    rep.shift_factor = std::exp(-beta * h.shift);
    rep.seed = opt.seed;
    const double d = static_cast<double>(h.dim());
    const CoolingSchedule sched =
        make_schedule(beta, h.emax, SchedulePolicy::kUniform);
    rep.ell = sched.ell;
    if (sched.ell == 0) {
      rep.z_hat = d;
      return rep;
    }
    const double prec = eps / static_cast<double>(sched.ell);
    double z_run = d;
    for (std::size_t k = 0; k < sched.ell; ++k) {
      const double f_true = diagonal_ratio(energies, sched.betas[k],
                                           sched.deltas[k]);
      const double theta = std::asin(std::sqrt(std::min(1.0, f_true)));
      const CountResult cr = count_ratio_angle(
          theta, prec, confidence, mix_seed(opt.seed, k), opt.counting);
      const double f_hat = std::min(1.0, std::max(cr.f_hat, 1e-12));
      z_run *= f_hat;
      RatioEntry entry;
      entry.beta_k = sched.betas[k];
      entry.beta_next = sched.betas[k + 1];
      entry.f_hat = f_hat;
      entry.precision = prec;
      entry.uses = cr.uses;
      rep.ratios.push_back(entry);
      rep.cost.counting_uses += cr.uses;
      rep.cost.state_preparations += 1.0 + cr.uses;
    }
    rep.z_hat = z_run;
    return rep;
  }
  return estimate_partition(eigendecompose(h), beta, eps, confidence, mode,
                            opt);
}

// Total counting cost model with unit constant:
// sqrt(D/z) * beta^5 emax^5 / eps^2, zero at beta = 0 (no cooling steps).
inline double total_cost_model(double system_dim, double z, double beta,
                               double emax, double eps) {
  if (!(system_dim > 0.0) || !(z > 0.0) || beta < 0.0 || !(emax > 0.0) ||
      !(eps > 0.0))
    throw config_error("cost model needs positive arguments");
  if (beta == 0.0) return 0.0;
  return std::sqrt(system_dim / z) * std::pow(beta * emax, 5) / (eps * eps);
}

}  // namespace qgibbs
