#pragma once

#include <cmath>
#include <numeric>

#include "qgibbs/hamiltonian.hpp"

namespace qgibbs {

// One row of a scaling sweep: Z, the cost exponent alpha, and the free
// energy density, all at the shifted-spectrum convention.
struct ThermalPoint {
  double beta = 0.0;
  double z = 0.0;
  double alpha = 0.0;
  double fdensity = 0.0;
};

// ln Z computed with the ground energy factored out for overflow safety.
inline double log_partition_function(const EigenSystem& eig, double beta) {
  if (beta < 0.0) throw std::domain_error("beta must be nonnegative");
  if (eig.energies.empty()) throw std::invalid_argument("empty spectrum");
  const double e0 = eig.energies.front();
  double s = 0.0;
  for (double e : eig.energies) s += std::exp(-beta * (e - e0));
  return -beta * e0 + std::log(s);
}

inline double partition_function(const EigenSystem& eig, double beta) {
  return std::exp(log_partition_function(eig, beta));
}

inline MatrixC gibbs_state(const EigenSystem& eig, double beta) {
  if (beta < 0.0) throw std::domain_error("beta must be nonnegative");
  const double e0 = eig.energies.front();
  const auto dim = static_cast<Eigen::Index>(eig.dim());
  VectorR w(dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    w(a) = std::exp(-beta * (eig.energies[static_cast<std::size_t>(a)] - e0));
  w /= w.sum();
  return eig.vectors * w.cast<cplx>().asDiagonal() * eig.vectors.adjoint();
}

// <exp(-(beta_k1 - beta_k) H)> in the Gibbs state at beta_k, evaluated as a
// thermal expectation rather than a quotient of partition functions so the
// two code paths can be tested against each other.
inline double ratio(const EigenSystem& eig, double beta_k, double beta_k1) {
  if (beta_k1 < beta_k) throw std::domain_error("schedule must be ascending");
  if (beta_k < 0.0) throw std::domain_error("beta must be nonnegative");
  const double e0 = eig.energies.front();
  const double dbeta = beta_k1 - beta_k;
  double wsum = 0.0;
  double acc = 0.0;
  for (double e : eig.energies) {
    const double w = std::exp(-beta_k * (e - e0));
    wsum += w;
    acc += w * std::exp(-dbeta * e);
  }
  return acc / wsum;
}

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
inline double fidelity(const MatrixC& rho, const MatrixC& sigma) {
  MatrixC r = psd_sqrt(rho);
  MatrixC inner = r * sigma * r;
  Eigen::SelfAdjointEigenSolver<MatrixC> es((inner + inner.adjoint()) / 2.0,
                                            Eigen::EigenvaluesOnly);
  double f = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    f += std::sqrt(std::max(es.eigenvalues()(i), 0.0));
  return f;
}

// alpha = (1 - ln Z / ln D) / 2; fdensity = -ln Z / (n beta) with the
// beta = 0 value fixed at 0 by the continuity convention of the exact
// ground shift (ln Z -> ln D there).
inline ThermalPoint scaling_exponent(const EigenSystem& eig, double beta,
                                     int n_sites) {
  ThermalPoint p;
  p.beta = beta;
  const double log_d = std::log(static_cast<double>(eig.dim()));
  const double log_z = log_partition_function(eig, beta);
  p.z = std::exp(log_z);
  p.alpha = (beta == 0.0) ? 0.0 : 0.5 * (1.0 - log_z / log_d);
  p.fdensity = (beta == 0.0) ? 0.0 : -log_z / (n_sites * beta);
  return p;
}

}  // namespace qgibbs
