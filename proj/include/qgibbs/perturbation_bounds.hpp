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
// Numerical verification lab for the perturbation bounds: principal and
// contour matrix logarithms over the right half-annulus, Lipschitz
// constants, spectral wedge containment, Weyl-type partition-function
// sandwiches, and the Golden-Thompson-strengthened fidelity bound.

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qgibbs/exact_oracle.hpp"
#include "qgibbs/rng.hpp"

namespace qgibbs {

// Matrix-log Lipschitz constant over the R = 2 half-annulus.
inline constexpr double kWedgeLogBound = 6.0 * kPi + 12.0;

inline double scalar_log_lipschitz_kappa(double r_outer) {
  return std::max(2.0 / r_outer, r_outer);
}

// -------------------------------------------------------------------------
// Principal logarithm of a unitary (spectral path)

namespace detail {

struct UnitaryEigen {
  MatrixC q;            // unitary basis
  std::vector<cplx> d;  // eigenvalues
};

inline UnitaryEigen schur_eigen(const MatrixC& a) {
  Eigen::ComplexSchur<MatrixC> schur(a);
  if (schur.info() != Eigen::Success)
    throw std::runtime_error("schur decomposition failed");
  const MatrixC& t = schur.matrixT();
  double off = 0.0;
  for (Eigen::Index i = 0; i < t.rows(); ++i)
    for (Eigen::Index j = i + 1; j < t.cols(); ++j)
      off = std::max(off, std::abs(t(i, j)));
  if (off > 1e-8)
    throw std::invalid_argument("matrix is not normal enough to diagonalize");
  UnitaryEigen out;
  out.q = schur.matrixU();
  out.d.reserve(static_cast<std::size_t>(t.rows()));
  for (Eigen::Index i = 0; i < t.rows(); ++i) out.d.push_back(t(i, i));
  return out;
}

}  // namespace detail

// Principal matrix logarithm through the spectral decomposition. Rejects
// eigenvalues on the negative real ray, where the principal branch jumps.
inline MatrixC principal_log_unitary(const MatrixC& a) {
  const detail::UnitaryEigen eg = detail::schur_eigen(a);
  const auto n = a.rows();
  VectorC logs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx lambda = eg.d[static_cast<std::size_t>(i)];
    const double phase = std::arg(lambda);
    if (std::abs(std::abs(phase) - kPi) < 1e-9)
      throw std::domain_error("eigenphase on the branch cut");
    logs[i] = std::log(lambda);
  }
  return eg.q * logs.asDiagonal() * eg.q.adjoint();
}

// Independent exponential for round trips: a skew-Hermitian argument is
// rewritten as i times a Hermitian matrix and exponentiated through the
// self-adjoint eigensolver.
inline MatrixC skew_exp(const MatrixC& s) {
  const MatrixC k = (s - s.adjoint()) * cplx(0.0, -0.5);  // Hermitian, s = iK
  Eigen::SelfAdjointEigenSolver<MatrixC> es(k);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen decomposition failed");
  const auto n = s.rows();
  VectorC ph(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double w = es.eigenvalues()[i];
    ph[i] = cplx(std::cos(w), std::sin(w));
  }
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

// -------------------------------------------------------------------------
// Contour logarithm over the right half-annulus

// Boundary of {1/R <= |z| <= R, |arg z| <= pi/2}, walked counterclockwise:
// outer arc, upper radial segment, inner arc, lower radial segment.
struct WedgeContour {
  double r_outer = 2.0;
  std::size_t nodes_per_piece = 4096;

  void validate() const {
    if (!(r_outer > 1.0)) throw config_error("outer radius must exceed 1");
    if (nodes_per_piece < 8) throw config_error("too few quadrature nodes");
  }
};

namespace detail {

struct ContourNode {
  cplx z;
  cplx dz;  // weight * tangent, trapezoid rule folded in
};

inline std::vector<ContourNode> contour_nodes(const WedgeContour& c) {
  c.validate();
  std::vector<ContourNode> nodes;
  const std::size_t n = c.nodes_per_piece;
  nodes.reserve(4 * n + 4);
  const double r = c.r_outer;
  auto add_piece = [&nodes, n](auto param, auto tangent, double a, double b) {
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i <= n; ++i) {
      const double s = a + h * static_cast<double>(i);
      const double w = (i == 0 || i == n) ? 0.5 * h : h;
      nodes.push_back({param(s), w * tangent(s)});
    }
  };
  // Outer arc, s in [-pi/2, pi/2].
  add_piece([r](double s) { return cplx(r * std::cos(s), r * std::sin(s)); },
            [r](double s) { return cplx(-r * std::sin(s), r * std::cos(s)); },
            -kPi / 2.0, kPi / 2.0);
  // Upper segment from iR to i/R: z = iy, y from R down to 1/R.
  add_piece([](double y) { return cplx(0.0, y); },
            [](double) { return cplx(0.0, 1.0); }, r, 1.0 / r);
  // Inner arc, s from pi/2 down to -pi/2.
  add_piece(
      [r](double s) { return cplx(std::cos(s) / r, std::sin(s) / r); },
      [r](double s) { return cplx(-std::sin(s) / r, std::cos(s) / r); },
      kPi / 2.0, -kPi / 2.0);
  // Lower segment from -i/R to -iR: z = -iy... z = iy with y from -1/R to -R.
  add_piece([](double y) { return cplx(0.0, y); },
            [](double) { return cplx(0.0, 1.0); }, -1.0 / r, -r);
  return nodes;
}

}  // namespace detail

// Cauchy-integral logarithm: (1/2 pi i) contour-sum of log(z) (zI - A)^{-1}.
// Requires every eigenvalue of A to clear the contour by at least ten
// quadrature steps, so the resolvent stays resolved by the grid.
inline MatrixC contour_log(const MatrixC& a, const WedgeContour& contour) {
  contour.validate();
  const std::vector<detail::ContourNode> nodes =
      detail::contour_nodes(contour);
  const detail::UnitaryEigen eg = detail::schur_eigen(a);
  double step = 0.0;
  const double outer_len = kPi * contour.r_outer;
  step = std::max(step, outer_len / static_cast<double>(contour.nodes_per_piece));
  for (const cplx& lambda : eg.d) {
    double dist = 1e300;
    for (const auto& node : nodes)
      dist = std::min(dist, std::abs(lambda - node.z));
    if (dist < 10.0 * step)
      throw config_error("spectrum too close to the contour");
  }
  const auto n = a.rows();
  MatrixC acc = MatrixC::Zero(n, n);
  const MatrixC eye = MatrixC::Identity(n, n);
  for (const auto& node : nodes) {
    const MatrixC resolvent = (node.z * eye - a).partialPivLu().solve(eye);
    acc += std::log(node.z) * node.dz * resolvent;
  }
  return acc / cplx(0.0, 2.0 * kPi);
}

// -------------------------------------------------------------------------
// Lipschitz checks

// Max |log a - log b| / |a - b| over the supplied pairs; pairs closer than
// 1e-12 are skipped as limits. The bound max{2/R, R} is enforced.
inline double scalar_lipschitz_check(
    const std::vector<std::pair<cplx, cplx>>& samples, double r_outer) {
  const double kappa = scalar_log_lipschitz_kappa(r_outer);
  double worst = 0.0;
  for (const auto& [a, b] : samples) {
    const double dist = std::abs(a - b);
    if (dist < 1e-12) continue;
    const double ratio = std::abs(std::log(a) - std::log(b)) / dist;
    worst = std::max(worst, ratio);
  }
  if (worst > kappa + 1e-9)
    throw invariant_violation("scalar log Lipschitz bound exceeded");
  return worst;
}

// Wedge pair sampler matching the scalar bound's geometry: unit-modulus
// pairs with arguments across the wedge, and same-argument radial pairs
// spanning [1/R, R]. Chords cutting across the inner hole are excluded by
// construction; they obey the weaker half-annulus constant instead.
inline std::vector<std::pair<cplx, cplx>> sample_wedge_pairs(
    std::size_t count, double r_outer, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
  std::uniform_real_distribution<double> radius(1.0 / r_outer, r_outer);
  std::vector<std::pair<cplx, cplx>> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (i % 2 == 0) {
      const double p1 = angle(rng), p2 = angle(rng);
      out.emplace_back(cplx(std::cos(p1), std::sin(p1)),
                       cplx(std::cos(p2), std::sin(p2)));
    } else {
      const double p = angle(rng);
      const double r1 = radius(rng), r2 = radius(rng);
      out.emplace_back(cplx(r1 * std::cos(p), r1 * std::sin(p)),
                       cplx(r2 * std::cos(p), r2 * std::sin(p)));
    }
  }
  return out;
}

// Max ||Log A - Log B|| / ||A - B|| over unitary pairs; enforced against
// the contour-derived constant 6 pi + 12.
inline double matrix_lipschitz_check(
    const std::vector<std::pair<MatrixC, MatrixC>>& pairs,
    double r_outer = 2.0) {
  (void)r_outer;
  double worst = 0.0;
  for (const auto& [a, b] : pairs) {
    const double dist = spectral_norm(MatrixC(a - b));
    if (dist < 1e-12) continue;
    const MatrixC la = principal_log_unitary(a);
    const MatrixC lb = principal_log_unitary(b);
    const double ratio = spectral_norm(MatrixC(la - lb)) / dist;
    worst = std::max(worst, ratio);
  }
  if (worst > kWedgeLogBound + 1e-9)
    throw invariant_violation("matrix log Lipschitz bound exceeded");
  return worst;
}

// -------------------------------------------------------------------------
// Wedge containment and the effective Hamiltonian

struct WedgeCheck {
  bool ok = false;
  std::vector<double> phases;
};

// All eigenphases of a unitary within eps of an evolution with ||tH|| <=
// pi/4 must stay strictly inside (-pi/3, pi/3).
inline WedgeCheck wedge_spectrum_check(const MatrixC& u_tilde, double eps) {
  if (!(eps > 0.0) || eps > 0.25)
    throw config_error("wedge argument requires eps in (0, 1/4]");
  WedgeCheck out;
  const detail::UnitaryEigen eg = detail::schur_eigen(u_tilde);
  out.ok = true;
  for (const cplx& lambda : eg.d) {
    const double phase = std::arg(lambda);
    out.phases.push_back(phase);
    if (!(std::abs(phase) < kPi / 3.0)) out.ok = false;
  }
  return out;
}

// Interval form: the perturbed spectrum lies within eps/t of the exact
// spectral interval.
inline WedgeCheck wedge_spectrum_check(const MatrixC& u_tilde, double eps,
                                       double h_min, double h_max, double t) {
  WedgeCheck out = wedge_spectrum_check(u_tilde, eps);
  for (const double phase : out.phases) {
    const double energy = -phase / t;
    if (!(energy > h_min - eps / t && energy < h_max + eps / t)) out.ok = false;
  }
  return out;
}

// H~ = (i/t) Log U~, Hermitian by construction for unitary input.
inline MatrixC effective_hamiltonian(const MatrixC& u_tilde, double t) {
  if (!(t > 0.0)) throw config_error("evolution time must be positive");
  const MatrixC log_u = principal_log_unitary(u_tilde);
  MatrixC h = cplx(0.0, 1.0 / t) * log_u;
  const double herm_gap = spectral_norm(MatrixC(h - h.adjoint()));
  if (herm_gap > 1e-10)
    throw invariant_violation("effective interaction is not Hermitian");
  h = 0.5 * (h + MatrixC(h.adjoint()));
  return h;
}

// -------------------------------------------------------------------------
// Thermal bounds on dense Hermitian inputs

inline std::vector<double> dense_spectrum(const MatrixC& h) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen decomposition failed");
  return std::vector<double>(es.eigenvalues().data(),
                             es.eigenvalues().data() + es.eigenvalues().size());
}

inline double partition_from_dense(const MatrixC& h, double beta) {
  const std::vector<double> ev = dense_spectrum(h);
  const double e0 = *std::min_element(ev.begin(), ev.end());
  double z = 0.0;
  for (double e : ev) z += std::exp(-beta * (e - e0));
  return z * std::exp(-beta * e0);
}

inline MatrixC gibbs_from_dense(const MatrixC& h, double beta) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("eigen decomposition failed");
  const auto n = h.rows();
  const double e0 = es.eigenvalues().minCoeff();
  VectorR w(n);
  for (Eigen::Index i = 0; i < n; ++i)
    w[i] = std::exp(-beta * (es.eigenvalues()[i] - e0));
  w /= w.sum();
  return es.eigenvectors() * w.cast<cplx>().asDiagonal() *
         es.eigenvectors().adjoint();
}

struct WeylBound {
  double z = 0.0;
  double z_tilde = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double norm_diff = 0.0;
  double max_pairing_gap = 0.0;
};

// Sandwich e^{-beta ||H - H~||} Z <= Z~ <= e^{+beta ||H - H~||} Z, plus the
// sorted-eigenvalue pairing bound behind it. Violations throw.
inline WeylBound weyl_partition_bound(const MatrixC& h, const MatrixC& h_tilde,
                                      double beta) {
  if (!is_hermitian(h, 1e-9) || !is_hermitian(h_tilde, 1e-9))
    throw config_error("thermal bounds need Hermitian inputs");
  WeylBound out;
  out.norm_diff = spectral_norm(MatrixC(h - h_tilde));
  out.z = partition_from_dense(h, beta);
  out.z_tilde = partition_from_dense(h_tilde, beta);
  out.lower = std::exp(-beta * out.norm_diff) * out.z;
  out.upper = std::exp(beta * out.norm_diff) * out.z;
  std::vector<double> ea = dense_spectrum(h);
  std::vector<double> eb = dense_spectrum(h_tilde);
  for (std::size_t i = 0; i < ea.size(); ++i)
    out.max_pairing_gap =
        std::max(out.max_pairing_gap, std::abs(ea[i] - eb[i]));
  const double slack = 1e-9 * std::max(1.0, out.z);
  if (!(out.lower - slack <= out.z_tilde && out.z_tilde <= out.upper + slack))
    throw invariant_violation("thermal sandwich bound violated");
  if (out.max_pairing_gap > out.norm_diff + 1e-9)
    throw invariant_violation("eigenvalue pairing bound violated");
  return out;
}

struct FidelityBound {
  double fid = 0.0;
  double exp_bound = 0.0;  // e^{-beta ||H - H~||}
  double midpoint_chain = 0.0;  // Z_mid / sqrt(Z * Z~)
  double norm_diff = 0.0;
};

// Fidelity floor between the two thermal states, with the midpoint-average
// chain F >= Z((H+H~)/2) / sqrt(Z Z~) >= e^{-beta ||H-H~||} checked at
// every link. Violations throw.
inline FidelityBound fidelity_bound(const MatrixC& h, const MatrixC& h_tilde,
                                    double beta) {
  if (!is_hermitian(h, 1e-9) || !is_hermitian(h_tilde, 1e-9))
    throw config_error("thermal bounds need Hermitian inputs");
  FidelityBound out;
  out.norm_diff = spectral_norm(MatrixC(h - h_tilde));
  out.exp_bound = std::exp(-beta * out.norm_diff);
  const MatrixC rho = gibbs_from_dense(h, beta);
  const MatrixC sigma = gibbs_from_dense(h_tilde, beta);
  out.fid = fidelity(rho, sigma);
  const MatrixC mid = 0.5 * (h + h_tilde);
  out.midpoint_chain =
      partition_from_dense(mid, beta) /
      std::sqrt(partition_from_dense(h, beta) *
                partition_from_dense(h_tilde, beta));
  if (out.fid < out.exp_bound - 1e-9)
    throw invariant_violation("fidelity exponential floor violated");
  if (out.fid < out.midpoint_chain - 1e-9)
    throw invariant_violation("fidelity midpoint chain violated");
  if (out.midpoint_chain < out.exp_bound - 1e-9)
    throw invariant_violation("midpoint chain ordering violated");
  return out;
}

// Small-argument floor used in reporting: 1 - (4/pi) beta emax eps, the
// exponential bound linearized through t = pi/(4 emax).
inline double small_argument_fidelity_floor(double beta, double emax,
                                            double eps) {
  return 1.0 - (4.0 / kPi) * beta * emax * eps;
}

// Tr(e^{pB/2} e^{pA} e^{pB/2})^{1/p} over the ascending p grid; must be
// nondecreasing, and its smallest-p value must dominate Tr e^{A+B}.
inline std::vector<double> gt_monotonicity_check(
    const MatrixC& a, const MatrixC& b, const std::vector<double>& p_grid) {
  if (!is_hermitian(a, 1e-9) || !is_hermitian(b, 1e-9))
    throw config_error("monotonicity check needs Hermitian inputs");
  if (p_grid.empty() || p_grid.front() <= 0.0)
    throw config_error("p grid must be positive ascending");
  std::vector<double> values;
  values.reserve(p_grid.size());
  for (double p : p_grid) {
    const MatrixC eb = hermitian_exp(b, 0.5 * p);
    const MatrixC ea = hermitian_exp(a, p);
    MatrixC m = eb * ea * eb;
    m = 0.5 * (m + MatrixC(m.adjoint()));
    const std::vector<double> mu = dense_spectrum(m);
    double tr = 0.0;
    for (double v : mu) tr += std::pow(std::max(v, 1e-300), 1.0 / p);
    values.push_back(tr);
  }
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] + 1e-9 < values[i - 1])
      throw invariant_violation("trace functional not monotone in p");
  const double limit = [&] {
    MatrixC sum = a + b;
    sum = 0.5 * (sum + MatrixC(sum.adjoint()));
    const std::vector<double> mu = dense_spectrum(sum);
    double tr = 0.0;
    for (double v : mu) tr += std::exp(v);
    return tr;
  }();
  if (values.front() + 1e-9 < limit)
    throw invariant_violation("p -> 0 limit dominates the smallest-p value");
  return values;
}

// -------------------------------------------------------------------------
// Random wedge ensemble and the aggregate report

// Haar-like unitary with eigenphases compressed into 90% of (-pi/4, pi/4),
// satisfying the wedge precondition with margin.
inline MatrixC wedge_unitary(std::size_t dim, std::mt19937_64& rng) {
  const MatrixC u = haar_like_unitary(dim, rng);
  const detail::UnitaryEigen eg = detail::schur_eigen(u);
  const auto n = static_cast<Eigen::Index>(dim);
  VectorC d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double phase =
        std::arg(eg.d[static_cast<std::size_t>(i)]) * (0.9 * 0.25);
    d[i] = cplx(std::cos(phase), std::sin(phase));
  }
  return eg.q * d.asDiagonal() * eg.q.adjoint();
}

struct BoundCheck {
  std::string name;
  std::size_t trials = 0;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct BoundReport {
  std::vector<BoundCheck> checks;
  bool all_pass() const {
    for (const BoundCheck& c : checks)
      if (!c.pass) return false;
    return true;
  }
};

// Runs the whole verification suite at the given ensemble sizes. Each check
// records its observed extreme against the asserted bound.
inline BoundReport run_all_bound_checks(std::size_t trials, std::size_t dim,
                                        std::uint64_t seed,
                                        double r_outer = 2.0) {
  BoundReport report;
  auto rng = make_rng(seed);

  {  // Scalar Lipschitz constant over wedge pairs.
    const auto pairs =
        sample_wedge_pairs(std::max<std::size_t>(trials * 10, 1000), r_outer,
                           rng);
    BoundCheck c;
    c.name = "scalar_log_lipschitz";
    c.trials = pairs.size();
    c.observed = scalar_lipschitz_check(pairs, r_outer);
    c.bound = scalar_log_lipschitz_kappa(r_outer);
    c.pass = c.observed <= c.bound + 1e-9;
    report.checks.push_back(c);
  }

  {  // Matrix Lipschitz over near unitary pairs.
    std::vector<std::pair<MatrixC, MatrixC>> pairs;
    pairs.reserve(trials);
    std::uniform_real_distribution<double> mag(0.0, 0.1);
    for (std::size_t i = 0; i < trials; ++i) {
      const MatrixC a = wedge_unitary(dim, rng);
      MatrixC g = random_hermitian(dim, rng);
      g *= mag(rng) / spectral_norm(g);
      const MatrixC b = skew_exp(MatrixC(cplx(0.0, 1.0) * g)) * a;
      pairs.emplace_back(a, b);
    }
    BoundCheck c;
    c.name = "matrix_log_lipschitz";
    c.trials = pairs.size();
    c.observed = matrix_lipschitz_check(pairs, r_outer);
    c.bound = kWedgeLogBound;
    c.pass = c.observed <= c.bound + 1e-9;
    report.checks.push_back(c);
  }

  {  // Spectral vs contour agreement.
    WedgeContour contour;
    contour.r_outer = r_outer;
    double worst = 0.0;
    const std::size_t n_log = std::min<std::size_t>(trials, 16);
    for (std::size_t i = 0; i < n_log; ++i) {
      const MatrixC a = wedge_unitary(dim, rng);
      worst = std::max(
          worst,
          spectral_norm(MatrixC(contour_log(a, contour) -
                                principal_log_unitary(a))));
    }
    BoundCheck c;
    c.name = "contour_vs_spectral_log";
    c.trials = n_log;
    c.observed = worst;
    c.bound = 1e-6;
    c.pass = c.observed <= c.bound;
    report.checks.push_back(c);
  }

  {  // Resolvent norms on both arcs.
    double worst_outer = 0.0, worst_inner = 0.0;
    std::uniform_real_distribution<double> angle(-kPi / 2.0, kPi / 2.0);
    const MatrixC eye = MatrixC::Identity(static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim));
    const std::size_t n_res = std::min<std::size_t>(trials, 64);
    for (std::size_t i = 0; i < n_res; ++i) {
      const MatrixC a = wedge_unitary(dim, rng);
      const double s = angle(rng);
      const cplx z_out(r_outer * std::cos(s), r_outer * std::sin(s));
      const cplx z_in(std::cos(s) / r_outer, std::sin(s) / r_outer);
      worst_outer = std::max(
          worst_outer,
          spectral_norm(MatrixC((z_out * eye - a).partialPivLu().solve(eye))));
      worst_inner = std::max(
          worst_inner,
          spectral_norm(MatrixC((z_in * eye - a).partialPivLu().solve(eye))));
    }
    BoundCheck c;
    c.name = "resolvent_outer_arc";
    c.trials = n_res;
    c.observed = worst_outer;
    c.bound = 1.0 / (r_outer - 1.0);
    c.pass = c.observed <= c.bound + 1e-9;
    report.checks.push_back(c);
    c.name = "resolvent_inner_arc";
    c.observed = worst_inner;
    c.bound = r_outer / (r_outer - 1.0);
    c.pass = c.observed <= c.bound + 1e-9;
    report.checks.push_back(c);
  }

  {  // Weyl sandwich and eigenvalue pairing.
    double worst = 0.0;
    std::uniform_real_distribution<double> mag(0.0, 0.5);
    const std::vector<double> betas = {0.5, 1.0, 2.0};
    for (std::size_t i = 0; i < trials; ++i) {
      MatrixC h = random_hermitian(dim, rng);
      h /= spectral_norm(h);
      MatrixC g = random_hermitian(dim, rng);
      g *= mag(rng) / spectral_norm(g);
      const MatrixC ht = h + g;
      for (double beta : betas) {
        const WeylBound wb = weyl_partition_bound(h, ht, beta);
        const double margin =
            std::max(wb.lower / wb.z_tilde, wb.z_tilde / wb.upper);
        worst = std::max(worst, margin);
      }
    }
    BoundCheck c;
    c.name = "weyl_partition_sandwich";
    c.trials = trials * betas.size();
    c.observed = worst;
    c.bound = 1.0;
    c.pass = worst <= 1.0 + 1e-9;
    report.checks.push_back(c);
  }

  {  // Fidelity floor with the midpoint chain.
    double worst = 1e300;
    std::uniform_real_distribution<double> mag(0.0, 0.2);
    for (std::size_t i = 0; i < trials; ++i) {
      MatrixC h = random_hermitian(dim, rng);
      h /= spectral_norm(h);
      MatrixC g = random_hermitian(dim, rng);
      g *= mag(rng) / spectral_norm(g);
      const FidelityBound fb = fidelity_bound(h, MatrixC(h + g), 1.0);
      worst = std::min(worst, fb.fid - fb.exp_bound);
    }
    BoundCheck c;
    c.name = "fidelity_exponential_floor";
    c.trials = trials;
    c.observed = worst;
    c.bound = 0.0;
    c.pass = worst >= -1e-9;
    report.checks.push_back(c);
  }

  {  // Trace functional monotonicity.
    const std::vector<double> grid = {0.1, 0.5, 1.0, 2.0, 4.0};
    bool ok = true;
    double worst_step = 0.0;
    for (std::size_t i = 0; i < trials; ++i) {
      MatrixC a = random_hermitian(dim, rng);
      a /= spectral_norm(a);
      MatrixC b = random_hermitian(dim, rng);
      b /= spectral_norm(b);
      const std::vector<double> vals = gt_monotonicity_check(a, b, grid);
      for (std::size_t k = 1; k < vals.size(); ++k)
        worst_step = std::min(worst_step, vals[k] - vals[k - 1]);
    }
    BoundCheck c;
    c.name = "trace_functional_monotone";
    c.trials = trials;
    c.observed = worst_step;
    c.bound = 0.0;
    c.pass = ok && worst_step >= -1e-9;
    report.checks.push_back(c);
  }

  return report;
}

}  // namespace qgibbs
