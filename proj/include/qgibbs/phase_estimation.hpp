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
// Phase estimation over the energy register: outcome kernel, analytic
// per-eigencomponent application, the median-of-eta filter with exact
// order-statistics accounting, and exact or perturbed evolution unitaries.

#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "qgibbs/hamiltonian.hpp"
#include "qgibbs/rng.hpp"
#include "qgibbs/state.hpp"

namespace qgibbs {

// -------------------------------------------------------------------------
// Configuration

struct QPEConfig {
  int m = 4;        // output energy bits
  int padding = 4;  // extra bits carried by the register
  int eta = 1;      // repetitions feeding the median
  double emax = 1.0;
  double t = 0.0;  // evolution time, fixed to pi / (4 emax)

  int total_bits() const { return m + padding; }
  std::size_t grid_size() const { return std::size_t{1} << total_bits(); }

  void validate() const {
    if (m < 1 || eta < 1 || padding < 0)
      throw config_error("phase estimation needs m >= 1, eta >= 1, padding >= 0");
    if (!(emax > 0.0)) throw config_error("emax must be positive");
    if (std::abs(t * emax - kPi / 4.0) > 1e-14)
      throw invariant_violation("evolution time must satisfy t*emax = pi/4");
    if (total_bits() > 26)
      throw config_error("energy register beyond simulable size");
  }
};

inline QPEConfig make_qpe_config(double emax, int m, int eta = 1,
                                 int padding = 4) {
  QPEConfig cfg;
  cfg.m = m;
  cfg.padding = padding;
  cfg.eta = eta;
  cfg.emax = emax;
  cfg.t = kPi / (4.0 * emax);
  cfg.validate();
  return cfg;
}

inline RegisterLayout layout_for(const QPEConfig& cfg, std::size_t system_dim,
                                 int flag_count = 2) {
  RegisterLayout lay;
  lay.system_dim = system_dim;
  lay.energy_bits = cfg.total_bits();
  lay.flag_count = flag_count;
  lay.emax = cfg.emax;
  return lay;
}

// -------------------------------------------------------------------------
// Outcome kernel. A phase fraction phi in [0, 1) read through an m-bit
// register produces outcome j with amplitude
//   f(j) = e^{i pi (M-1) x / M} sin(pi x) / (M sin(pi x / M)),
// where M = 2^m and x is the cyclic distance phi*M - j. The squared
// magnitudes sum to one exactly.

namespace detail {
inline double wrap_to_half(double x, double period) {
  double r = std::fmod(x, period);
  if (r > period / 2.0) r -= period;
  if (r <= -period / 2.0) r += period;
  return r;
}
}  // namespace detail

inline cplx kernel_amp_phase(std::size_t j, double phi, int m_bits) {
  const double M = static_cast<double>(std::size_t{1} << m_bits);
  const double x =
      detail::wrap_to_half(phi * M - static_cast<double>(j), M);
  const double xr = x - std::round(x);
  if (std::abs(xr) < 1e-15 && std::abs(x) < 0.5) return cplx(1.0, 0.0);
  if (std::abs(xr) < 1e-15) return cplx(0.0, 0.0);
  const double mag = std::sin(kPi * x) / (M * std::sin(kPi * x / M));
  const double arg = kPi * x * (M - 1.0) / M;
  return cplx(mag * std::cos(arg), mag * std::sin(arg));
}

inline double kernel_prob_phase(std::size_t j, double phi, int m_bits) {
  return std::norm(kernel_amp_phase(j, phi, m_bits));
}

// Energy-labelled entry point: the register discretizes [0, 8 emax).
inline double kernel_prob(std::size_t j, double energy, int m_bits,
                          double emax) {
  if (j >= (std::size_t{1} << m_bits))
    throw std::out_of_range("grid index outside register");
  return kernel_prob_phase(j, energy / (8.0 * emax), m_bits);
}

// -------------------------------------------------------------------------
// Evolution unitaries

inline MatrixC evolution_unitary(const EigenSystem& eig, double emax) {
  if (!(emax > 0.0)) throw config_error("emax must be positive");
  const double t = kPi / (4.0 * emax);
  const auto d = eig.vectors.rows();
  MatrixC u = MatrixC::Zero(d, d);
  VectorC phases(d);
  for (Eigen::Index a = 0; a < d; ++a) {
    const double e = eig.energies[static_cast<std::size_t>(a)];
    phases[a] = cplx(std::cos(e * t), -std::sin(e * t));
  }
  u = eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
  return u;
}

struct EvolutionPair {
  MatrixC u_exact;
  MatrixC u_tilde;
  double eps = 0.0;  // certified operator-norm bound on u_exact - u_tilde
};

enum class PerturbMode { kTrotter, kRandomHermitian };

// Builds a perturbed evolution unitary with a certified operator-norm
// distance to the exact one. Trotter mode splits the interaction into its
// local terms and picks the repetition count from the first-order
// commutator bound; random mode adds a scaled random Hermitian generator
// and certifies the measured dense norm.
inline EvolutionPair perturbed_unitary(const LocalHamiltonian& h,
                                       const EigenSystem& eig, double eps,
                                       PerturbMode mode,
                                       std::uint64_t seed = 1) {
  if (!(eps > 0.0) || eps > 0.25)
    throw config_error("perturbation size must lie in (0, 1/4]");
  EvolutionPair pair;
  pair.u_exact = evolution_unitary(eig, h.emax);
  const double t = kPi / (4.0 * h.emax);
  const auto d = static_cast<Eigen::Index>(h.dim());

  if (mode == PerturbMode::kTrotter) {
    std::vector<MatrixC> terms;
    terms.reserve(h.terms.size());
    for (const LocalTerm& term : h.terms) {
      MatrixC full = MatrixC::Zero(d, d);
      detail::add_term_dense(full, term, h.n);
      terms.push_back(std::move(full));
    }
    double comm_sum = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i)
      for (std::size_t j = i + 1; j < terms.size(); ++j) {
        const MatrixC c = terms[i] * terms[j] - terms[j] * terms[i];
        comm_sum += spectral_norm(c);
      }
    // First-order product formula error <= t^2 / (2r) * sum of commutator
    // norms; choose the smallest r meeting the target.
    std::size_t r = 1;
    if (comm_sum > 0.0)
      r = static_cast<std::size_t>(
          std::max(1.0, std::ceil(t * t * comm_sum / (2.0 * eps))));
    MatrixC step = MatrixC::Identity(d, d);
    const double dt = t / static_cast<double>(r);
    for (const MatrixC& term : terms) step = evolution_exp(term, dt) * step;
    MatrixC prod = MatrixC::Identity(d, d);
    for (std::size_t k = 0; k < r; ++k) prod = step * prod;
    // The constant shift commutes with everything and contributes a global
    // phase.
    const cplx phase(std::cos(h.shift * t), -std::sin(h.shift * t));
    pair.u_tilde = phase * prod;
    pair.eps = comm_sum > 0.0
                   ? std::min(eps, t * t * comm_sum / (2.0 * static_cast<double>(r)))
                   : 0.0;
    if (pair.eps == 0.0) pair.eps = spectral_norm(pair.u_exact - pair.u_tilde);
    return pair;
  }

  // Random Hermitian direction, rescaled by bisection until the measured
  // distance falls in (0.9 eps, eps].
  auto rng = make_rng(mix_seed(seed, 0x7065727475726221ull));
  MatrixC g = random_hermitian(static_cast<std::size_t>(d), rng);
  g /= spectral_norm(g);
  const MatrixC h_dense = dense_matrix(h);
  auto dist_at = [&](double s) {
    const MatrixC ht = h_dense + s * g;
    return spectral_norm(pair.u_exact - evolution_exp(ht, t));
  };
  double lo = 0.0, hi = eps / t;
  while (dist_at(hi) <= eps && hi < 1e6) hi *= 2.0;
  for (int it = 0; it < 200 && dist_at(hi) <= eps; ++it) hi *= 2.0;
  double dist_lo = 0.0;
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double dm = dist_at(mid);
    if (dm <= eps) {
      lo = mid;
      dist_lo = dm;
    } else {
      hi = mid;
    }
    if (dist_lo > 0.9 * eps) break;
  }
  pair.u_tilde = evolution_exp(h_dense + lo * g, t);
  pair.eps = std::max(dist_lo, 1e-15);
  return pair;
}

// Eigenvalues of the supplied unitary read back as grid energies: each
// eigenphase is mapped to the energy in [0, 8 emax) whose evolution
// produces it, then sorted ascending.
inline std::vector<double> effective_grid_energies(const MatrixC& u, double t,
                                                   double emax) {
  Eigen::ComplexEigenSolver<MatrixC> solver(u, false);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("eigen decomposition of unitary failed");
  std::vector<double> energies;
  energies.reserve(static_cast<std::size_t>(u.rows()));
  const double period = 8.0 * emax;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    const double arg = std::arg(solver.eigenvalues()[i]);
    double e = std::fmod(-arg / t, period);
    if (e < 0.0) e += period;
    energies.push_back(e);
  }
  std::sort(energies.begin(), energies.end());
  return energies;
}

// -------------------------------------------------------------------------
// Analytic QPE application: eigencomponent a acquires the kernel amplitude
// row for its marked energy. energies[a] labels compressed row a.

inline void qpe_apply(CompressedState& st, const std::vector<double>& energies,
                      const QPEConfig& cfg) {
  cfg.validate();
  if (st.layout.energy_bits != cfg.total_bits() || st.layout.emax != cfg.emax)
    throw std::invalid_argument("state layout does not match configuration");
  if (energies.size() != st.layout.system_dim)
    throw std::invalid_argument("one marked energy required per component");
  const std::size_t grid = st.layout.grid_size();
  const std::size_t fs = st.layout.flag_states();
  for (std::size_t a = 0; a < st.layout.system_dim; ++a)
    for (std::size_t mu = 0; mu < st.mult; ++mu)
      for (std::size_t f = 0; f < fs; ++f)
        for (std::size_t j = 1; j < grid; ++j)
          if (std::norm(st.at(a, mu, j, f)) > 0.0)
            throw std::logic_error("energy register occupied");
  for (std::size_t a = 0; a < st.layout.system_dim; ++a) {
    const double phi = energies[a] / (8.0 * cfg.emax);
    std::vector<cplx> row(grid);
    for (std::size_t j = 0; j < grid; ++j)
      row[j] = kernel_amp_phase(j, phi, cfg.total_bits());
    for (std::size_t mu = 0; mu < st.mult; ++mu)
      for (std::size_t f = 0; f < fs; ++f) {
        const cplx base = st.at(a, mu, 0, f);
        if (std::norm(base) == 0.0) continue;
        for (std::size_t j = 0; j < grid; ++j)
          st.at(a, mu, j, f) = base * row[j];
      }
  }
}

inline void qpe_apply(CompressedState& st, const MatrixC& u,
                      const QPEConfig& cfg) {
  qpe_apply(st, effective_grid_energies(u, cfg.t, cfg.emax), cfg);
}

// -------------------------------------------------------------------------
// Median filter. The eta outcome registers are summarized by their lower
// median (order statistic ceil(eta/2) under the plain integer order the
// circuit compares with). The induced distribution is exact order
// statistics over the single-run law; work registers act as orthogonal
// garbage labels per (component, median value), so the compressed rows
// stay mutually orthogonal.

namespace detail {

// P[Binomial(n, p) >= r], computed termwise in log space.
inline double binomial_upper_tail(int n, double p, int r) {
  if (r <= 0) return 1.0;
  if (r > n) return 0.0;
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  const double lp = std::log(p), lq = std::log1p(-p);
  double sum = 0.0;
  for (int i = r; i <= n; ++i) {
    const double lc = std::lgamma(n + 1.0) - std::lgamma(i + 1.0) -
                      std::lgamma(n - i + 1.0);
    sum += std::exp(lc + i * lp + (n - i) * lq);
  }
  return std::min(1.0, sum);
}

}  // namespace detail

// Distribution of the lower median of eta iid draws from pmf (indexed by
// register value). P[median <= v] = P[Binom(eta, CDF(v)) >= ceil(eta/2)].
inline std::vector<double> median_distribution(const std::vector<double>& pmf,
                                               int eta) {
  if (eta < 1) throw config_error("median needs eta >= 1");
  const int r = (eta + 1) / 2;
  std::vector<double> log_choose(static_cast<std::size_t>(eta) + 1, 0.0);
  for (int i = r; i <= eta; ++i)
    log_choose[static_cast<std::size_t>(i)] = std::lgamma(eta + 1.0) -
                                              std::lgamma(i + 1.0) -
                                              std::lgamma(eta - i + 1.0);
  auto tail_at = [&](double p) {
    if (p <= 0.0) return 0.0;
    if (p >= 1.0) return 1.0;
    const double lp = std::log(p), lq = std::log1p(-p);
    double sum = 0.0;
    for (int i = r; i <= eta; ++i)
      sum += std::exp(log_choose[static_cast<std::size_t>(i)] + i * lp +
                      (eta - i) * lq);
    return std::min(1.0, sum);
  };
  std::vector<double> med(pmf.size(), 0.0);
  double cdf = 0.0;
  double prev_tail = 0.0;
  for (std::size_t j = 0; j < pmf.size(); ++j) {
    cdf = std::min(1.0, cdf + pmf[j]);
    const double tail = tail_at(cdf);
    med[j] = std::max(0.0, tail - prev_tail);
    prev_tail = tail;
  }
  return med;
}

struct MedianDiagnostics {
  std::vector<double> component_tail;  // per eigencomponent
  bool used_fallback = false;
};

// Applies the median-of-eta energy marking. Component a keeps its flag
// amplitude and spreads over the register with the square root of the
// median law; accounting mass decoding farther than half a coarse step
// from the true energy is added to state.badmass. Beyond exact_dp_limit
// work, a two-bin model (nearest value versus far mass) upper-bounds the
// tail instead.
inline MedianDiagnostics median_qpe(CompressedState& st,
                                    const std::vector<double>& energies,
                                    const QPEConfig& cfg,
                                    std::size_t exact_dp_limit = (std::size_t{1}
                                                                  << 26)) {
  cfg.validate();
  if (st.layout.energy_bits != cfg.total_bits() || st.layout.emax != cfg.emax)
    throw std::invalid_argument("state layout does not match configuration");
  if (energies.size() != st.layout.system_dim)
    throw std::invalid_argument("one marked energy required per component");
  const std::size_t grid = st.layout.grid_size();
  const std::size_t fs = st.layout.flag_states();
  const std::size_t pad_span = std::size_t{1} << cfg.padding;
  for (std::size_t a = 0; a < st.layout.system_dim; ++a)
    for (std::size_t mu = 0; mu < st.mult; ++mu)
      for (std::size_t f = 0; f < fs; ++f)
        for (std::size_t j = 1; j < grid; ++j)
          if (std::norm(st.at(a, mu, j, f)) > 0.0)
            throw std::logic_error("energy register occupied");

  MedianDiagnostics diag;
  diag.component_tail.assign(st.layout.system_dim, 0.0);
  const bool fallback =
      static_cast<double>(cfg.eta) * static_cast<double>(grid) >
      static_cast<double>(exact_dp_limit);
  diag.used_fallback = fallback;

  for (std::size_t a = 0; a < st.layout.system_dim; ++a) {
    const double phi = energies[a] / (8.0 * cfg.emax);
    // Good outcomes decode within half a coarse step of the truth, a window
    // centered on the phase that meets at most two coarse values.
    const double fine_pos = phi * static_cast<double>(grid);
    const double half_window = 0.5 * static_cast<double>(pad_span);
    const auto is_good = [&](std::size_t j) {
      double d = std::fabs(static_cast<double>(j) - fine_pos);
      d = std::min(d, static_cast<double>(grid) - d);
      return d <= half_window;
    };

    std::vector<double> med;
    double tail = 0.0;
    if (!fallback) {
      std::vector<double> pmf(grid);
      for (std::size_t j = 0; j < grid; ++j)
        pmf[j] = kernel_prob_phase(j, phi, cfg.total_bits());
      med = median_distribution(pmf, cfg.eta);
      double good = 0.0;
      for (std::size_t j = 0; j < grid; ++j)
        if (is_good(j)) good += med[j];
      tail = std::max(0.0, 1.0 - good);
    } else {
      // Two-bin model: all good mass sits on the nearest register value.
      double far = 0.0;
      for (std::size_t j = 0; j < grid; ++j)
        if (!is_good(j)) far += kernel_prob_phase(j, phi, cfg.total_bits());
      tail = detail::binomial_upper_tail(cfg.eta, far, (cfg.eta + 1) / 2);
      med.assign(grid, 0.0);
      const std::size_t nearest =
          static_cast<std::size_t>(std::llround(
              phi * static_cast<double>(grid))) %
          grid;
      const std::size_t antipode = (nearest + grid / 2) % grid;
      med[nearest] = 1.0 - tail;
      med[antipode] = tail;
    }
    diag.component_tail[a] = tail;

    double comp_weight = 0.0;
    for (std::size_t mu = 0; mu < st.mult; ++mu)
      for (std::size_t f = 0; f < fs; ++f)
        comp_weight += std::norm(st.at(a, mu, 0, f));
    st.badmass += comp_weight * tail;

    std::vector<double> amp(grid);
    for (std::size_t j = 0; j < grid; ++j) amp[j] = std::sqrt(med[j]);
    for (std::size_t mu = 0; mu < st.mult; ++mu)
      for (std::size_t f = 0; f < fs; ++f) {
        const cplx base = st.at(a, mu, 0, f);
        if (std::norm(base) == 0.0) continue;
        for (std::size_t j = 0; j < grid; ++j)
          st.at(a, mu, j, f) = base * amp[j];
      }
  }
  return diag;
}

inline MedianDiagnostics median_qpe(CompressedState& st, const MatrixC& u,
                                    const QPEConfig& cfg,
                                    std::size_t exact_dp_limit = (std::size_t{1}
                                                                  << 26)) {
  return median_qpe(st, effective_grid_energies(u, cfg.t, cfg.emax), cfg,
                    exact_dp_limit);
}

}  // namespace qgibbs
