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
// Thermal state preparation: cooling schedules, the purified marked Gibbs
// state built from an infinite-temperature start, energy-conditioned
// rotations, Grover and fixed-point amplification, and the cost model the
// measured counters are compared against.

#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "qgibbs/exact_oracle.hpp"
#include "qgibbs/phase_estimation.hpp"

namespace qgibbs {

// -------------------------------------------------------------------------
// Cooling schedule

struct CoolingSchedule {
  std::vector<double> betas;   // ascending, betas[0] = 0
  std::vector<double> deltas;  // deltas[k] = betas[k+1] - betas[k]
  std::size_t ell = 0;
};

enum class SchedulePolicy { kUniform, kAdaptive };

// Uniform policy: full steps of ln(2)/emax with a shorter final step, so
// every step keeps the thermal ratio at or above one half. Adaptive policy
// greedily extends each step while the oracle ratio stays above one half.
inline CoolingSchedule make_schedule(double beta, double emax,
                                     SchedulePolicy policy,
                                     const EigenSystem* eig = nullptr) {
  if (beta < 0.0) throw config_error("beta must be nonnegative");
  if (!(emax > 0.0)) throw config_error("emax must be positive");
  CoolingSchedule s;
  s.betas.push_back(0.0);
  if (beta == 0.0) {
    s.ell = 0;
    return s;
  }
  if (policy == SchedulePolicy::kUniform) {
    const double step = kLn2 / emax;
    const std::size_t ell = static_cast<std::size_t>(
        std::max(1.0, std::ceil(beta / step - 1e-12)));
    for (std::size_t k = 1; k < ell; ++k)
      s.betas.push_back(static_cast<double>(k) * step);
    s.betas.push_back(beta);
  } else {
    if (eig == nullptr)
      throw config_error("adaptive schedule needs an eigensystem");
    const double floor_step = kLn2 / emax;
    double cur = 0.0;
    while (cur < beta - 1e-15) {
      double lo = std::min(floor_step, beta - cur);
      double hi = beta - cur;
      // The floor step always satisfies the ratio bound; widen greedily.
      double best = lo;
      for (int it = 0; it < 60 && hi - best > 1e-12; ++it) {
        const double mid = 0.5 * (best + hi);
        if (ratio(*eig, cur, cur + mid) >= 0.5)
          best = mid;
        else
          hi = mid;
      }
      if (ratio(*eig, cur, cur + hi) >= 0.5) best = hi;
      cur = std::min(beta, cur + best);
      s.betas.push_back(cur);
    }
    s.betas.back() = beta;
  }
  s.ell = s.betas.size() - 1;
  for (std::size_t k = 0; k < s.ell; ++k)
    s.deltas.push_back(s.betas[k + 1] - s.betas[k]);
  return s;
}

// -------------------------------------------------------------------------
// Cost counters

struct CostCounters {
  double u_applications = 0.0;  // controlled evolution applications
  double qpe_invocations = 0.0;
  double state_preparations = 0.0;
  double reflections = 0.0;
  double counting_uses = 0.0;
  double thermalizer_invocations = 0.0;

  CostCounters& operator+=(const CostCounters& o) {
    u_applications += o.u_applications;
    qpe_invocations += o.qpe_invocations;
    state_preparations += o.state_preparations;
    reflections += o.reflections;
    counting_uses += o.counting_uses;
    thermalizer_invocations += o.thermalizer_invocations;
    return *this;
  }
  CostCounters& scale(double factor) {
    u_applications *= factor;
    qpe_invocations *= factor;
    state_preparations *= factor;
    reflections *= factor;
    return *this;
  }
};

// -------------------------------------------------------------------------
// Purified Gibbs state

struct PurifiedGibbs {
  CompressedState state;
  double beta = 0.0;
  double badmass_bound = 0.0;  // tracked squared-mass bound off the grid pair
  double residual = 0.0;       // flag mass outside the target component
  CostCounters cost;
};

// Marked infinite-temperature purification: maximally entangled pairing,
// then the median energy filter. The reduced system state is I/D up to the
// recorded badmass.
inline PurifiedGibbs prepare_infinite_temperature(const EigenSystem& eig,
                                                  const QPEConfig& cfg) {
  cfg.validate();
  PurifiedGibbs pg;
  pg.beta = 0.0;
  CompressedState st = maximally_entangled_init(layout_for(cfg, eig.dim()));
  median_qpe(st, eig.energies, cfg);
  pg.badmass_bound = st.badmass;
  pg.state = std::move(st);
  pg.cost.u_applications =
      static_cast<double>(cfg.eta) *
      (static_cast<double>(cfg.grid_size()) - 1.0);
  pg.cost.qpe_invocations = static_cast<double>(cfg.eta);
  pg.cost.state_preparations = 1.0;
  return pg;
}

// Rotation step: conditioned on the recorded energy, the rotation ancilla
// (flag 0) acquires the Boltzmann amplitude for beta_next - beta. The good
// component keeps the flag at |0>.
inline CompressedState step_rotate(const PurifiedGibbs& pg, double beta_next) {
  if (beta_next < pg.beta)
    throw config_error("rotation target must not decrease beta");
  CompressedState st = pg.state;
  conditional_rotation(st, beta_next - pg.beta, 0);
  return st;
}

// Projects the rotation flag onto |0> and renormalizes; models the
// heralded ancilla measurement between pipeline stages. Returns the
// discarded squared mass.
inline double project_flag_zero(CompressedState& st, int which_flag = 0) {
  const std::size_t fs = st.layout.flag_states();
  const std::size_t bit = std::size_t{1} << which_flag;
  double kept = 0.0, dropped = 0.0;
  for (std::size_t i = 0; i < st.amplitudes.size(); ++i) {
    if ((i % fs) & bit) {
      dropped += std::norm(st.amplitudes[i]);
      st.amplitudes[i] = cplx(0.0, 0.0);
    } else {
      kept += std::norm(st.amplitudes[i]);
    }
  }
  if (kept <= 0.0) throw invariant_violation("projection removed all mass");
  const double inv = 1.0 / std::sqrt(kept);
  for (cplx& v : st.amplitudes) v *= inv;
  st.badmass /= kept;
  return dropped;
}

// -------------------------------------------------------------------------
// Amplification

// q Grover iterations of reflections about the start state and the flag-0
// subspace. The iterate count follows floor(sqrt(D / z_estimate)).
inline std::size_t grover_iterations(double z_estimate, double system_dim) {
  if (!(z_estimate > 0.0)) throw config_error("z estimate must be positive");
  return static_cast<std::size_t>(
      std::floor(std::sqrt(system_dim / z_estimate)));
}

struct AmplifyResult {
  std::size_t iterations = 0;
  double initial_weight = 0.0;
  double final_weight = 0.0;
  double analytic_weight = 0.0;  // sin^2((2q+1) theta)
  double preparations = 1.0;     // start-state preparations consumed
};

inline AmplifyResult amplitude_amplify(CompressedState& st, double z_estimate,
                                       double system_dim) {
  AmplifyResult res;
  res.iterations = grover_iterations(z_estimate, system_dim);
  res.initial_weight = st.flag_weight(0, 0);
  const double theta =
      std::asin(std::sqrt(std::min(1.0, std::max(0.0, res.initial_weight))));
  res.analytic_weight = std::pow(
      std::sin((2.0 * static_cast<double>(res.iterations) + 1.0) * theta), 2);
  const CompressedState axis = st;
  for (std::size_t i = 0; i < res.iterations; ++i) {
    reflection_about_flag(st, 0);
    reflection_about_state(st, axis);
  }
  res.final_weight = st.flag_weight(0, 0);
  res.preparations = 2.0 * static_cast<double>(res.iterations) + 1.0;
  return res;
}

struct FixedPointResult {
  std::size_t preboost = 0;   // plain Grover iterations before recursing
  std::size_t levels = 0;     // recursion depth
  double preparations = 1.0;  // start-state preparations consumed
  double initial_weight = 0.0;
  double final_weight = 0.0;
  double constant_c = 0.0;  // preparations / ((1/sqrt(w)) ln(1/residual))
  std::vector<double> level_weights;
};

namespace detail {

// Recursion levels needed to push residual 1-w to the target, given that
// one level cubes the residual.
inline std::size_t levels_for(double weight, double target_residual) {
  const double r0 = 1.0 - weight;
  if (r0 <= target_residual) return 0;
  if (r0 >= 1.0) return 64;
  const double need = std::log(target_residual) / std::log(r0);
  return static_cast<std::size_t>(
      std::min(64.0, std::ceil(std::log(need) / std::log(3.0) - 1e-12)));
}

}  // namespace detail

// Fixed-point amplifier: a short optimal-count Grover boost followed by the
// pi/3 recursion, which cubes the residual per level and needs no weight
// knowledge beyond a lower bound. Preparation count is tracked as
// (2q+1) * 3^levels.
inline FixedPointResult fixed_point_amplify(CompressedState& st,
                                            double target_residual) {
  FixedPointResult res;
  res.initial_weight = st.flag_weight(0, 0);
  res.final_weight = res.initial_weight;
  if (target_residual >= 1.0) return res;  // no-op request
  if (!(target_residual > 0.0))
    throw config_error("target residual must be positive");
  if (res.initial_weight <= 0.0)
    throw invariant_violation("no target mass to amplify");

  const double theta =
      std::asin(std::sqrt(std::min(1.0, res.initial_weight)));
  // Choose the boost count minimizing total preparations.
  const std::size_t q_star = static_cast<std::size_t>(std::max(
      0.0, std::round((kPi / (2.0 * theta) - 1.0) / 2.0)));
  std::size_t best_q = 0;
  double best_cost = -1.0;
  for (std::size_t q = 0; q <= q_star + 1; ++q) {
    const double w =
        std::pow(std::sin((2.0 * static_cast<double>(q) + 1.0) * theta), 2);
    const std::size_t lv = detail::levels_for(w, target_residual);
    const double cost = (2.0 * static_cast<double>(q) + 1.0) *
                        std::pow(3.0, static_cast<double>(lv));
    if (best_cost < 0.0 || cost < best_cost) {
      best_cost = cost;
      best_q = q;
    }
  }
  res.preboost = best_q;

  const CompressedState base = st;
  for (std::size_t i = 0; i < res.preboost; ++i) {
    reflection_about_flag(st, 0);
    reflection_about_state(st, base);
  }
  res.final_weight = st.flag_weight(0, 0);
  res.level_weights.push_back(res.final_weight);

  // pi/3 recursion on the boosted state: each level applies the target
  // phase, then the phase-relaxed reflection about the current level state.
  const cplx phase(std::cos(kPi / 3.0), std::sin(kPi / 3.0));
  std::size_t levels = 0;
  while (1.0 - res.final_weight > target_residual && levels < 64) {
    const CompressedState axis = st;
    phase_on_flag(st, 0, 0, phase);
    const cplx ov = inner_product(axis, st);
    const cplx coef = (cplx(1.0, 0.0) - phase) * ov;
    for (std::size_t i = 0; i < st.amplitudes.size(); ++i)
      st.amplitudes[i] -= coef * axis.amplitudes[i];
    ++levels;
    res.final_weight = st.flag_weight(0, 0);
    res.level_weights.push_back(res.final_weight);
  }
  res.levels = levels;
  res.preparations = (2.0 * static_cast<double>(res.preboost) + 1.0) *
                     std::pow(3.0, static_cast<double>(levels));
  const double denom = (1.0 / std::sqrt(res.initial_weight)) *
                       std::max(1.0, std::log(1.0 / target_residual));
  res.constant_c = res.preparations / denom;
  return res;
}

// -------------------------------------------------------------------------
// Full preparation

enum class Amplifier { kGrover, kFixedPoint };
enum class ZSource { kOracle, kProvided };

struct PrepOptions {
  Amplifier amplifier = Amplifier::kFixedPoint;
  ZSource z_source = ZSource::kOracle;
  double z_provided = 0.0;  // used when z_source = kProvided
  int padding = 4;
  std::optional<int> m_override;
  std::optional<int> eta_override;
  // Global-maximum sizing: when set, m and eta are computed once at the
  // final beta instead of per step (simpler cost accounting).
  bool global_max = true;
};

inline int prep_energy_bits(double beta, std::size_t ell, double t,
                            double eps) {
  const double arg = beta * static_cast<double>(ell) / (t * eps);
  return std::max(1, static_cast<int>(std::ceil(std::log2(arg))));
}

inline int prep_eta(double beta_k, double emax, std::size_t ell, double eps) {
  const double val =
      (std::log(static_cast<double>(ell) / eps) + beta_k * emax) / kLn2;
  return std::max(1, static_cast<int>(std::ceil(val)));
}

// Prepares the purified Gibbs state at the requested inverse temperature:
// marked infinite-temperature start, one energy-conditioned rotation over
// the full beta (sequential schedule rotations compose to exactly this when
// the ancilla is reset between steps), then amplification sized by the
// supplied or oracle partition estimate. Register sizes follow
// m = ceil(log2(beta*ell/(t*eps))) and eta = ceil((ln(ell/eps) + beta*emax)/ln 2).
inline PurifiedGibbs prepare_purified_gibbs(const EigenSystem& eig,
                                            double beta, double eps,
                                            const PrepOptions& opt = {}) {
  if (!(eps > 0.0) || eps >= 1.0)
    throw config_error("accuracy must lie in (0,1)");
  const double t = kPi / (4.0 * eig.emax);
  const CoolingSchedule sched =
      make_schedule(beta, eig.emax, SchedulePolicy::kUniform);

  if (sched.ell == 0) {
    const int m = opt.m_override.value_or(4);
    const int eta = opt.eta_override.value_or(1);
    return prepare_infinite_temperature(
        eig, make_qpe_config(eig.emax, m, eta, opt.padding));
  }

  const int m =
      opt.m_override.value_or(prep_energy_bits(beta, sched.ell, t, eps));
  const int eta =
      opt.eta_override.value_or(prep_eta(beta, eig.emax, sched.ell, eps));
  const QPEConfig cfg = make_qpe_config(eig.emax, m, eta, opt.padding);

  PurifiedGibbs pg = prepare_infinite_temperature(eig, cfg);
  CompressedState st = step_rotate(pg, beta);
  const double delta = eps / static_cast<double>(sched.ell);

  double z_est = 0.0;
  switch (opt.z_source) {
    case ZSource::kOracle:
      z_est = partition_function(eig, beta);
      break;
    case ZSource::kProvided:
      if (!(opt.z_provided > 0.0))
        throw config_error("provided z estimate must be positive");
      z_est = opt.z_provided;
      break;
  }

  double preparations = 1.0;
  double reflections = 0.0;
  double residual = 0.0;
  bool use_grover = opt.amplifier == Amplifier::kGrover;
  if (use_grover) {
    // Predict the Grover outcome and fall back to the fixed-point
    // amplifier when the iterate count lands far from the rotation crest.
    const std::size_t q =
        grover_iterations(z_est, static_cast<double>(eig.dim()));
    const double theta = std::asin(std::sqrt(std::min(1.0, st.flag_weight(0, 0))));
    const double predicted = std::pow(
        std::sin((2.0 * static_cast<double>(q) + 1.0) * theta), 2);
    if (predicted < 0.25) use_grover = false;
  }
  if (use_grover) {
    AmplifyResult ar =
        amplitude_amplify(st, z_est, static_cast<double>(eig.dim()));
    preparations = ar.preparations;
    residual = 1.0 - ar.final_weight;
    reflections = 2.0 * static_cast<double>(ar.iterations);
  } else {
    FixedPointResult fr = fixed_point_amplify(st, delta);
    preparations = fr.preparations;
    residual = 1.0 - fr.final_weight;
    reflections = preparations - 1.0;
  }

  // Amplification can magnify the squared off-grid mass by at most the
  // inverse of the smallest amplified weight, bounded by D/Z and hence by
  // e^{beta emax}; the tracked bound applies the full factor.
  const double growth = std::exp(beta * eig.emax);
  pg.state = std::move(st);
  pg.state.badmass = std::min(1.0, pg.state.badmass * growth);
  pg.badmass_bound = pg.state.badmass;
  pg.beta = beta;
  pg.residual = residual;
  pg.cost.scale(preparations);
  pg.cost.reflections = reflections;
  pg.cost.state_preparations = preparations;
  return pg;
}

// Cost model for one thermal-state preparation:
// sqrt(D/z) * (beta emax / delta) * ln(1/delta) * (ln(1/delta) + beta emax),
// with the beta = 0 convention of zero cost (no cooling steps).
inline double thermalization_cost(double beta, double emax, double delta,
                                  double system_dim, double z) {
  if (beta < 0.0 || !(emax > 0.0) || !(delta > 0.0) || !(system_dim > 0.0) ||
      !(z > 0.0))
    throw config_error("cost model needs positive arguments");
  if (beta == 0.0) return 0.0;
  const double log_term = std::log(1.0 / delta);
  return std::sqrt(system_dim / z) * (beta * emax / delta) * log_term *
         (log_term + beta * emax);
}

}  // namespace qgibbs
