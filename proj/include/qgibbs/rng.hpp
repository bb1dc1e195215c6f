#pragma once

#include <random>

#include "qgibbs/linalg.hpp"

namespace qgibbs {

inline std::mt19937_64 make_rng(std::uint64_t seed) {
  return std::mt19937_64(seed);
}

inline MatrixC random_gaussian_complex(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixC g(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) {
      double re = gauss(rng);
      double im = gauss(rng);
      g(i, j) = cplx(re, im);
    }
  return g;
}

// GUE-style Hermitian matrix, entries O(1); callers rescale as needed.
inline MatrixC random_hermitian(int dim, std::mt19937_64& rng) {
  MatrixC g = random_gaussian_complex(dim, rng);
  return (g + g.adjoint()) / 2.0;
}

// Haar-like unitary: QR of a complex Gaussian matrix with the phase of the
// R diagonal absorbed so the distribution does not depend on the QR pivoting.
inline MatrixC haar_like_unitary(int dim, std::mt19937_64& rng) {
  MatrixC g = random_gaussian_complex(dim, rng);
  Eigen::HouseholderQR<MatrixC> qr(g);
  MatrixC q = qr.householderQ();
  MatrixC r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    cplx d = r(i, i);
    double a = std::abs(d);
    q.col(i) *= (a > 0) ? d / a : cplx(1.0, 0.0);
  }
  return q;
}

}  // namespace qgibbs
