#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "qgibbs/common.hpp"

namespace qgibbs {

using MatrixC = Eigen::MatrixXcd;
using MatrixR = Eigen::MatrixXd;
using VectorC = Eigen::VectorXcd;
using VectorR = Eigen::VectorXd;

inline bool is_hermitian(const MatrixC& m, double tol = 1e-12) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

// Largest singular value. Hermitian inputs take the cheaper eigenvalue path.
inline double spectral_norm(const MatrixC& m) {
  if (m.rows() == m.cols() && is_hermitian(m, 1e-12)) {
    Eigen::SelfAdjointEigenSolver<MatrixC> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<MatrixC> svd(m);
  return svd.singularValues()(0);
}

inline double spectral_norm_hermitian(const MatrixR& m) {
  if (m.isDiagonal(0.0)) return m.diagonal().cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<MatrixR> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

// f(H) for Hermitian H via eigendecomposition, f applied to eigenvalues.
template <typename Fn>
MatrixC hermitian_function(const MatrixC& h, Fn f) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigensolve failed");
  const auto& v = es.eigenvectors();
  VectorC d(h.rows());
  for (Eigen::Index i = 0; i < h.rows(); ++i) d(i) = f(es.eigenvalues()(i));
  return v * d.asDiagonal() * v.adjoint();
}

inline MatrixC hermitian_exp(const MatrixC& h, double scale = 1.0) {
  return hermitian_function(h, [scale](double x) { return cplx(std::exp(scale * x), 0.0); });
}

// exp(-i t H) for Hermitian H.
inline MatrixC evolution_exp(const MatrixC& h, double t) {
  return hermitian_function(h, [t](double x) { return std::exp(cplx(0.0, -t * x)); });
}

// Square root of a positive semidefinite matrix; small negative eigenvalues
// from roundoff are clipped to zero.
inline MatrixC psd_sqrt(const MatrixC& m) {
  return hermitian_function(m, [](double x) { return cplx(std::sqrt(std::max(x, 0.0)), 0.0); });
}

inline double trace_distance(const MatrixC& rho, const MatrixC& sigma) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(rho - sigma, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

inline std::vector<double> sorted_eigenvalues(const MatrixC& h) {
  Eigen::SelfAdjointEigenSolver<MatrixC> es(h, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(),
                          es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace qgibbs
