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

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qgibbs/linalg.hpp"

namespace qgibbs {

enum class Boundary { kOpen, kPeriodic };
enum class ShiftPolicy { kTriangle, kExactGround };

inline constexpr std::size_t kDefaultDenseLimit = std::size_t{1} << 14;

// One bounded-norm term acting on a small ordered set of sites.
struct LocalTerm {
  std::vector<int> support;  // ascending site indices, |support| <= k
  MatrixC block;             // Hermitian, dimension d^|support|
  double norm = 0.0;         // cached spectral norm of block
};

inline LocalTerm make_term(std::vector<int> support, MatrixC block) {
  if (!is_hermitian(block, 1e-12))
    throw std::invalid_argument("local term block is not Hermitian");
  for (std::size_t i = 1; i < support.size(); ++i)
    if (support[i] <= support[i - 1])
      throw std::invalid_argument("term support must be strictly ascending");
  LocalTerm t;
  t.support = std::move(support);
  t.norm = spectral_norm(block);
  t.block = std::move(block);
  return t;
}

// Sum of k-local terms on n d-level sites, plus the positivity shift data.
// After shift_positive the dense spectrum lies strictly inside (0, emax).
struct LocalHamiltonian {
  int n = 0;
  int d = 2;
  int k = 2;
  std::vector<LocalTerm> terms;
  double shift = 0.0;  // constant added to the bare sum of terms
  double emax = 0.0;   // strict upper bound on the shifted spectrum; 0 until shifted
  std::size_t dense_limit = kDefaultDenseLimit;

  std::size_t dim() const {
    std::size_t r = 1;
    for (int i = 0; i < n; ++i) r *= static_cast<std::size_t>(d);
    return r;
  }
  bool shifted() const { return emax > 0.0; }
  double term_norm_sum() const {
    double s = 0.0;
    for (const auto& t : terms) s += t.norm;
    return s;
  }
};

struct EigenSystem {
  std::vector<double> energies;  // ascending, shifted convention
  MatrixC vectors;               // unitary, columns are eigenvectors
  double emax = 0.0;
  double shift = 0.0;
  std::size_t dim() const { return energies.size(); }
};

namespace detail {

// Embeds a term block into the full 2^n space; d = 2 only.
// Qubit i is the bit (n-1-i) of the basis index, so site 0 is the leftmost
// factor of the tensor product.
inline void add_term_dense(MatrixC& h, const LocalTerm& t, int n) {
  const std::size_t dim = std::size_t{1} << n;
  const int ns = static_cast<int>(t.support.size());
  const std::size_t bdim = std::size_t{1} << ns;
  std::vector<int> shifts(ns);
  for (int s = 0; s < ns; ++s) shifts[s] = n - 1 - t.support[s];
  for (std::size_t base = 0; base < dim; ++base) {
    // extract the sub-index of the supported sites
    std::size_t row_sub = 0;
    for (int s = 0; s < ns; ++s)
      row_sub = (row_sub << 1) | ((base >> shifts[s]) & 1u);
    for (std::size_t col_sub = 0; col_sub < bdim; ++col_sub) {
      const cplx v = t.block(row_sub, col_sub);
      if (v == cplx(0.0, 0.0)) continue;
      std::size_t col = base;
      for (int s = 0; s < ns; ++s) {
        const std::size_t bit = (col_sub >> (ns - 1 - s)) & 1u;
        col = (col & ~(std::size_t{1} << shifts[s])) | (bit << shifts[s]);
      }
      h(static_cast<Eigen::Index>(base), static_cast<Eigen::Index>(col)) += v;
    }
  }
}

inline MatrixC pauli_x() {
  MatrixC m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

inline MatrixC pauli_zz() {
  MatrixC m = MatrixC::Zero(4, 4);
  m(0, 0) = 1;
  m(1, 1) = -1;
  m(2, 2) = -1;
  m(3, 3) = 1;
  return m;
}

}  // namespace detail

inline MatrixC dense_matrix(const LocalHamiltonian& h) {
  if (h.d != 2) throw config_error("only d = 2 builders are supported");
  if (h.dim() > h.dense_limit)
    throw config_error("dense matrix exceeds the configured dense limit");
  MatrixC m = MatrixC::Zero(static_cast<Eigen::Index>(h.dim()),
                            static_cast<Eigen::Index>(h.dim()));
  for (const auto& t : h.terms) detail::add_term_dense(m, t, h.n);
  m += h.shift * MatrixC::Identity(m.rows(), m.cols());
  return m;
}

inline bool dense_is_real(const LocalHamiltonian& h) {
  for (const auto& t : h.terms)
    if (t.block.imag().cwiseAbs().maxCoeff() > 0.0) return false;
  return true;
}

// Transverse-field Ising chain: g * sigma_x on every site plus J * sigma_z
// sigma_z on every bond. A periodic chain of length n has n bonds (the
// length-2 ring keeps its double bond); self-bonds at n = 1 are dropped.
inline LocalHamiltonian build_ising(int n, double J, double g,
                                    Boundary boundary,
                                    std::size_t dense_limit = kDefaultDenseLimit) {
  if (n < 1) throw config_error("site count must be >= 1");
  if (!std::isfinite(J) || !std::isfinite(g))
    throw config_error("couplings must be finite");
  LocalHamiltonian h;
  h.n = n;
  h.d = 2;
  h.k = 2;
  h.dense_limit = dense_limit;
  if (h.dim() > dense_limit)
    throw config_error("requested chain exceeds the dense limit");
  for (int i = 0; i < n; ++i)
    h.terms.push_back(make_term({i}, g * detail::pauli_x()));
  const int nbonds = (boundary == Boundary::kPeriodic) ? n : n - 1;
  for (int i = 0; i < nbonds; ++i) {
    int a = i;
    int b = (i + 1) % n;
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    h.terms.push_back(make_term({a, b}, J * detail::pauli_zz()));
  }
  return h;
}

// Couplings (g, J) with g/J equal to the requested ratio, rescaled so the
// spectral norm of the full chain equals the norm of its coupling-only part
// (which a fully aligned product state saturates: one unit per bond).
inline std::pair<double, double> normalize_couplings(
    double g_over_J, int n, Boundary boundary,
    std::size_t dense_limit = kDefaultDenseLimit) {
  if (!(g_over_J > 0.0)) throw config_error("coupling ratio must be positive");
  LocalHamiltonian bonds_only = build_ising(n, 1.0, 0.0, boundary, dense_limit);
  LocalHamiltonian raw = build_ising(n, 1.0, g_over_J, boundary, dense_limit);
  const double target = spectral_norm(dense_matrix(bonds_only));
  const double raw_norm = spectral_norm(dense_matrix(raw));
  const double s = (raw_norm > 0.0) ? target / raw_norm : 0.0;
  return {s * g_over_J, s};
}

// Canonical representative of the g/J <-> J/g pair used by scaling-curve
// sweeps: the field-dominant member. The two members share spectral norms
// exactly, but their finite-chain spectra differ (the coupling-dominant
// member carries a near-degenerate ground doublet), so curve-level symmetry
// holds only through this canonicalization.
inline double canonical_field_ratio(double g_over_J) {
  if (!(g_over_J > 0.0)) throw config_error("coupling ratio must be positive");
  return std::max(g_over_J, 1.0 / g_over_J);
}

inline double bound_emax(const LocalHamiltonian& h) {
  return h.shift + h.term_norm_sum();
}

// Adds the positivity shift. Triangle policy needs no eigensolve; exact
// ground policy pins the minimum eigenvalue at the margin. Validation of
// strict containment runs whenever the dense solve is affordable.
inline LocalHamiltonian shift_positive(LocalHamiltonian h, ShiftPolicy policy) {
  if (h.shifted()) throw std::invalid_argument("Hamiltonian is already shifted");
  const double norm_sum = h.term_norm_sum();
  const double margin = 1e-6 * norm_sum;
  if (policy == ShiftPolicy::kTriangle) {
    h.shift = norm_sum + margin;
    // Commuting models can reach +norm_sum exactly, so the top margin keeps
    // the containment strict rather than saturated.
    h.emax = h.shift + norm_sum + margin;
  } else {
    if (h.dim() > h.dense_limit)
      throw config_error("exact ground shift needs a dense solve below the limit");
    double lmin, lmax;
    if (dense_is_real(h)) {
      MatrixR m = dense_matrix(h).real();
      Eigen::SelfAdjointEigenSolver<MatrixR> es(m, Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues().minCoeff();
      lmax = es.eigenvalues().maxCoeff();
    } else {
      Eigen::SelfAdjointEigenSolver<MatrixC> es(dense_matrix(h),
                                                Eigen::EigenvaluesOnly);
      lmin = es.eigenvalues().minCoeff();
      lmax = es.eigenvalues().maxCoeff();
    }
    h.shift = -lmin + margin;
    h.emax = (lmax - lmin) + 2.0 * margin;
  }
  if (!h.terms.empty() && h.dim() <= h.dense_limit) {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(dense_matrix(h),
                                              Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().maxCoeff();
    if (!(0.0 < lo && hi < h.emax))
      throw invariant_violation("shifted spectrum escaped (0, emax)");
  }
  return h;
}

inline EigenSystem eigendecompose(const LocalHamiltonian& h) {
  if (h.dim() > h.dense_limit)
    throw config_error("eigendecompose needs dimension below the dense limit");
  EigenSystem sys;
  sys.emax = h.emax;
  sys.shift = h.shift;
  if (dense_is_real(h)) {
    MatrixR m = dense_matrix(h).real();
    Eigen::SelfAdjointEigenSolver<MatrixR> es(m);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigensolve failed");
    sys.energies.assign(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
    sys.vectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(dense_matrix(h));
    if (es.info() != Eigen::Success)
      throw std::runtime_error("eigensolve failed");
    sys.energies.assign(es.eigenvalues().data(),
                        es.eigenvalues().data() + es.eigenvalues().size());
    sys.vectors = es.eigenvectors();
  }
  return sys;
}

// Diagonal Hamiltonian with prescribed unshifted diagonal entries, used for
// synthetic on-grid spectra and classical-mode inputs. len must be 2^n.
inline LocalHamiltonian build_diagonal(const std::vector<double>& diag,
                                       std::size_t dense_limit = kDefaultDenseLimit) {
  std::size_t len = diag.size();
  if (len == 0 || (len & (len - 1)) != 0)
    throw config_error("diagonal length must be a power of two");
  int n = 0;
  while ((std::size_t{1} << n) < len) ++n;
  LocalHamiltonian h;
  h.n = std::max(n, 1);
  h.d = 2;
  h.k = h.n;
  h.dense_limit = dense_limit;
  MatrixC block = MatrixC::Zero(static_cast<Eigen::Index>(h.dim()),
                                static_cast<Eigen::Index>(h.dim()));
  for (std::size_t i = 0; i < h.dim(); ++i)
    block(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) =
        diag[i % len];
  std::vector<int> support(h.n);
  for (int i = 0; i < h.n; ++i) support[i] = i;
  h.terms.push_back(make_term(support, block));
  return h;
}

// Synthetic EigenSystem straight from a shifted spectrum, with the identity
// eigenbasis; oracle-scale tests use this to pin grid-exact energies.
inline EigenSystem synthetic_eigensystem(std::vector<double> energies,
                                         double emax, double shift = 0.0) {
  EigenSystem sys;
  std::sort(energies.begin(), energies.end());
  sys.vectors = MatrixC::Identity(static_cast<Eigen::Index>(energies.size()),
                                  static_cast<Eigen::Index>(energies.size()));
  sys.energies = std::move(energies);
  sys.emax = emax;
  sys.shift = shift;
  return sys;
}

}  // namespace qgibbs
