#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <utility>
#include <vector>

#include "qgibbs/perturbation_bounds.hpp"
#include "qgibbs/phase_estimation.hpp"

namespace qgibbs {
namespace {

TEST_CASE("principal log and skew exponential invert each other", "[log]") {
  const MatrixC eye = MatrixC::Identity(3, 3);
  CHECK(spectral_norm(principal_log_unitary(eye)) < 1e-14);

  const cplx w = std::polar(1.0, 0.3);
  const MatrixC lg = principal_log_unitary(MatrixC(w * eye));
  CHECK(spectral_norm(MatrixC(lg - cplx(0.0, 0.3) * eye)) < 1e-13);

  auto rng = make_rng(3);
  const MatrixC u = wedge_unitary(6, rng);
  const MatrixC round = skew_exp(principal_log_unitary(u));
  CHECK(spectral_norm(MatrixC(round - u)) < 1e-12);
}

TEST_CASE("principal log rejects the branch cut and non-normal input",
          "[log]") {
  MatrixC cut = MatrixC::Identity(2, 2);
  cut(0, 0) = -1.0;
  REQUIRE_THROWS_AS(principal_log_unitary(cut), std::domain_error);

  MatrixC jordan = MatrixC::Identity(2, 2);
  jordan(0, 1) = 1.0;
  REQUIRE_THROWS_AS(principal_log_unitary(jordan), std::invalid_argument);
}

TEST_CASE("contour quadrature reproduces the spectral logarithm", "[log]") {
  WedgeContour contour;
  CHECK(spectral_norm(contour_log(MatrixC::Identity(2, 2), contour)) < 1e-6);

  auto rng = make_rng(5);
  const MatrixC u = wedge_unitary(4, rng);
  const double diff =
      spectral_norm(MatrixC(contour_log(u, contour) -
                            principal_log_unitary(u)));
  CHECK(diff < 1e-6);
}

TEST_CASE("contour quadrature converges at second order", "[log]") {
  auto rng = make_rng(7);
  const MatrixC u = wedge_unitary(4, rng);
  const MatrixC exact = principal_log_unitary(u);
  auto err_at = [&](std::size_t nodes) {
    WedgeContour c;
    c.nodes_per_piece = nodes;
    return spectral_norm(MatrixC(contour_log(u, c) - exact));
  };
  const double e512 = err_at(512);
  const double e2048 = err_at(2048);
  const double e8192 = err_at(8192);
  CHECK(e2048 < e512);
  CHECK(e512 / e8192 >= 50.0);
}

TEST_CASE("contour rejects spectra hugging the boundary", "[log]") {
  MatrixC u = MatrixC::Identity(2, 2);
  u(0, 0) = cplx(0.0, 1.0);  // sits on the upper radial segment
  WedgeContour contour;
  REQUIRE_THROWS_AS(contour_log(u, contour), config_error);

  WedgeContour bad;
  bad.r_outer = 1.0;
  REQUIRE_THROWS_AS(contour_log(MatrixC::Identity(2, 2), bad), config_error);
  bad.r_outer = 2.0;
  bad.nodes_per_piece = 4;
  REQUIRE_THROWS_AS(contour_log(MatrixC::Identity(2, 2), bad), config_error);
}

TEST_CASE("scalar Lipschitz constant holds over the wedge", "[lipschitz]") {
  CHECK(scalar_log_lipschitz_kappa(2.0) == 2.0);
  CHECK(scalar_log_lipschitz_kappa(4.0) == 4.0);
  CHECK(scalar_log_lipschitz_kappa(1.25) == Catch::Approx(1.6));

  auto rng = make_rng(11);
  const auto pairs = sample_wedge_pairs(10000, 2.0, rng);
  REQUIRE(pairs.size() == 10000);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [a, b] = pairs[i];
    for (const cplx& z : {a, b}) {
      CHECK(std::abs(std::arg(z)) <= kPi / 2.0 + 1e-12);
      CHECK(std::abs(z) >= 0.5 - 1e-12);
      CHECK(std::abs(z) <= 2.0 + 1e-12);
    }
    if (i % 2 == 0) {
      CHECK(std::abs(a) == Catch::Approx(1.0).margin(1e-12));
      CHECK(std::abs(b) == Catch::Approx(1.0).margin(1e-12));
    } else if (std::abs(a) > 1e-9 && std::abs(b) > 1e-9) {
      CHECK(std::arg(a) == Catch::Approx(std::arg(b)).margin(1e-12));
    }
  }
  const double worst = scalar_lipschitz_check(pairs, 2.0);
  CHECK(worst <= 2.0 + 1e-9);
  CHECK(worst > 0.5);  // the ensemble actually exercises the bound
}

TEST_CASE("chords across the spectral hole break the wedge constant",
          "[lipschitz]") {
  // Points on opposite rims of the inner hole: the logs differ by i pi
  // while the points are only one diameter apart.
  std::vector<std::pair<cplx, cplx>> hole = {
      {cplx(0.0, 0.5), cplx(0.0, -0.5)}};
  REQUIRE_THROWS_AS(scalar_lipschitz_check(hole, 2.0), invariant_violation);

  std::vector<std::pair<cplx, cplx>> degenerate = {{cplx(1.0, 0.0),
                                                    cplx(1.0, 0.0)}};
  CHECK(scalar_lipschitz_check(degenerate, 2.0) == 0.0);
}

TEST_CASE("matrix Lipschitz ratio is computed exactly on commuting pairs",
          "[lipschitz]") {
  const MatrixC eye = MatrixC::Identity(3, 3);
  const cplx w = std::polar(1.0, 0.3);
  std::vector<std::pair<MatrixC, MatrixC>> pairs = {{eye, MatrixC(w * eye)}};
  const double expect = 0.3 / std::abs(cplx(1.0, 0.0) - w);
  CHECK(matrix_lipschitz_check(pairs) == Catch::Approx(expect).margin(1e-12));
}

TEST_CASE("matrix log stays Lipschitz over random wedge pairs",
          "[lipschitz]") {
  auto rng = make_rng(13);
  std::uniform_real_distribution<double> mag(0.0, 0.1);
  std::vector<std::pair<MatrixC, MatrixC>> pairs;
  for (int i = 0; i < 50; ++i) {
    const MatrixC a = wedge_unitary(6, rng);
    MatrixC g = random_hermitian(6, rng);
    g *= mag(rng) / spectral_norm(g);
    pairs.emplace_back(a, MatrixC(skew_exp(MatrixC(cplx(0.0, 1.0) * g)) * a));
  }
  const double worst = matrix_lipschitz_check(pairs);
  CHECK(worst <= kWedgeLogBound + 1e-9);
  CHECK(worst > 0.0);
}

TEST_CASE("wedge containment check reads eigenphases", "[wedge]") {
  auto rng = make_rng(17);
  const WedgeCheck inside = wedge_spectrum_check(wedge_unitary(6, rng), 0.1);
  CHECK(inside.ok);
  CHECK(inside.phases.size() == 6);

  MatrixC out = MatrixC::Identity(2, 2);
  out(0, 0) = std::polar(1.0, 1.2);  // beyond pi/3
  CHECK_FALSE(wedge_spectrum_check(out, 0.1).ok);

  REQUIRE_THROWS_AS(wedge_spectrum_check(out, 0.0), config_error);
  REQUIRE_THROWS_AS(wedge_spectrum_check(out, 0.3), config_error);
}

TEST_CASE("interval form localizes energies within eps over t", "[wedge]") {
  EigenSystem sys = synthetic_eigensystem({0.5, 1.5}, 2.0);
  const MatrixC u = evolution_unitary(sys, 2.0);
  const double t = kPi / 8.0;
  CHECK(wedge_spectrum_check(u, 0.01, 0.0, 2.0, t).ok);
  CHECK_FALSE(wedge_spectrum_check(u, 0.01, 0.6, 2.0, t).ok);
}

TEST_CASE("effective interaction inverts the exact evolution", "[wedge]") {
  EigenSystem sys = synthetic_eigensystem({0.5, 1.5}, 2.0);
  const MatrixC u = evolution_unitary(sys, 2.0);
  const double t = kPi / 8.0;
  MatrixC h = MatrixC::Zero(2, 2);
  h(0, 0) = 0.5;
  h(1, 1) = 1.5;
  CHECK(spectral_norm(MatrixC(effective_hamiltonian(u, t) - h)) < 1e-10);
  REQUIRE_THROWS_AS(effective_hamiltonian(u, 0.0), config_error);
}

TEST_CASE("perturbed evolutions give nearby effective interactions",
          "[wedge]") {
  const auto [g, j] = normalize_couplings(1.0, 2, Boundary::kOpen);
  LocalHamiltonian ham = build_ising(2, j, g, Boundary::kOpen);
  ham = shift_positive(ham, ShiftPolicy::kExactGround);
  EigenSystem eig = eigendecompose(ham);
  const double t = kPi / (4.0 * ham.emax);

  EvolutionPair pair =
      perturbed_unitary(ham, eig, 0.05, PerturbMode::kRandomHermitian, 21);
  const MatrixC h_dense =
      eig.vectors *
      Eigen::Map<const VectorR>(eig.energies.data(),
                                static_cast<Eigen::Index>(eig.energies.size()))
          .cast<cplx>()
          .asDiagonal() *
      eig.vectors.adjoint();
  const MatrixC h_eff = effective_hamiltonian(pair.u_tilde, t);
  const double gap = spectral_norm(MatrixC(h_dense - h_eff));
  CHECK(gap <= kWedgeLogBound * pair.eps / t + 1e-9);

  const FidelityBound fb = fidelity_bound(h_dense, h_eff, 1.0);
  CHECK(fb.fid >= std::exp(-kWedgeLogBound * pair.eps / t) - 1e-9);
  CHECK(wedge_spectrum_check(pair.u_tilde, pair.eps, 0.0, ham.emax, t).ok);
}

TEST_CASE("thermal sandwich saturates on uniform shifts", "[thermal]") {
  auto rng = make_rng(19);
  MatrixC h = random_hermitian(6, rng);
  h /= spectral_norm(h);

  const WeylBound same = weyl_partition_bound(h, h, 1.0);
  CHECK(same.norm_diff < 1e-12);
  CHECK(same.max_pairing_gap < 1e-12);
  CHECK(same.z == Catch::Approx(same.z_tilde).epsilon(1e-12));

  const double c = 0.3;
  const MatrixC shifted = h + c * MatrixC::Identity(6, 6);
  const WeylBound wb = weyl_partition_bound(h, shifted, 1.5);
  CHECK(wb.norm_diff == Catch::Approx(c).margin(1e-9));
  CHECK(wb.max_pairing_gap == Catch::Approx(c).margin(1e-9));
  CHECK(wb.z_tilde == Catch::Approx(std::exp(-1.5 * c) * wb.z).epsilon(1e-9));
  CHECK(wb.lower == Catch::Approx(wb.z_tilde).epsilon(1e-8));

  MatrixC skew = h;
  skew(0, 1) += cplx(0.0, 0.5);
  REQUIRE_THROWS_AS(weyl_partition_bound(h, skew, 1.0), config_error);
}

TEST_CASE("fidelity floor reduces to Bhattacharyya for commuting states",
          "[thermal]") {
  MatrixC h = MatrixC::Zero(4, 4);
  MatrixC ht = MatrixC::Zero(4, 4);
  const std::vector<double> ea = {0.0, 0.7, 1.1, 2.0};
  const std::vector<double> eb = {0.2, 0.5, 1.3, 1.9};
  for (int i = 0; i < 4; ++i) {
    h(i, i) = ea[static_cast<std::size_t>(i)];
    ht(i, i) = eb[static_cast<std::size_t>(i)];
  }
  const double beta = 1.0;
  const FidelityBound fb = fidelity_bound(h, ht, beta);

  double za = 0.0, zb = 0.0;
  for (int i = 0; i < 4; ++i) {
    za += std::exp(-beta * ea[static_cast<std::size_t>(i)]);
    zb += std::exp(-beta * eb[static_cast<std::size_t>(i)]);
  }
  double bhat = 0.0;
  for (int i = 0; i < 4; ++i)
    bhat += std::sqrt(std::exp(-beta * ea[static_cast<std::size_t>(i)]) / za *
                      std::exp(-beta * eb[static_cast<std::size_t>(i)]) / zb);
  CHECK(fb.fid == Catch::Approx(bhat).margin(1e-10));
  CHECK(fb.fid >= fb.midpoint_chain - 1e-9);
  CHECK(fb.midpoint_chain >= fb.exp_bound - 1e-9);
}

TEST_CASE("small-argument floor linearizes the exponential bound",
          "[thermal]") {
  CHECK(small_argument_fidelity_floor(1.0, 2.0, 0.01) ==
        Catch::Approx(1.0 - (4.0 / kPi) * 0.02).margin(1e-15));
  for (double x : {0.001, 0.05, 0.3}) {
    CHECK(small_argument_fidelity_floor(1.0, 1.0, x) <=
          std::exp(-(4.0 / kPi) * x) + 1e-15);
  }
}

TEST_CASE("trace functional is flat for commuting arguments", "[thermal]") {
  MatrixC a = MatrixC::Zero(2, 2);
  MatrixC b = MatrixC::Zero(2, 2);
  a(0, 0) = 0.3;
  a(1, 1) = -0.2;
  b(0, 0) = 0.1;
  b(1, 1) = 0.4;
  const double limit = std::exp(0.4) + std::exp(0.2);
  const std::vector<double> vals =
      gt_monotonicity_check(a, b, {0.1, 0.5, 1.0, 2.0, 4.0});
  REQUIRE(vals.size() == 5);
  for (double v : vals) CHECK(v == Catch::Approx(limit).margin(1e-8));
}

TEST_CASE("trace functional grows with p and dominates the joint trace",
          "[thermal]") {
  auto rng = make_rng(23);
  MatrixC a = random_hermitian(5, rng);
  a /= spectral_norm(a);
  MatrixC b = random_hermitian(5, rng);
  b /= spectral_norm(b);
  const std::vector<double> grid = {0.1, 0.5, 1.0, 2.0, 4.0};
  const std::vector<double> vals = gt_monotonicity_check(a, b, grid);
  REQUIRE(vals.size() == grid.size());
  for (std::size_t i = 1; i < vals.size(); ++i)
    CHECK(vals[i] + 1e-9 >= vals[i - 1]);

  double limit = 0.0;
  for (double e : dense_spectrum(MatrixC(a + b))) limit += std::exp(e);
  CHECK(vals.front() + 1e-9 >= limit);
  CHECK(vals.back() > limit);  // noncommuting pair strictly exceeds it

  REQUIRE_THROWS_AS(gt_monotonicity_check(a, b, {}), config_error);
  REQUIRE_THROWS_AS(gt_monotonicity_check(a, b, {-1.0, 1.0}), config_error);
  MatrixC skew = a;
  skew(0, 1) += cplx(0.0, 1.0);
  REQUIRE_THROWS_AS(gt_monotonicity_check(skew, b, {1.0}), config_error);
}

TEST_CASE("aggregate verification suite passes and is reproducible",
          "[report]") {
  const BoundReport rep = run_all_bound_checks(5, 4, 123);
  REQUIRE(rep.checks.size() == 8);
  const std::vector<std::string> names = {
      "scalar_log_lipschitz",     "matrix_log_lipschitz",
      "contour_vs_spectral_log",  "resolvent_outer_arc",
      "resolvent_inner_arc",      "weyl_partition_sandwich",
      "fidelity_exponential_floor", "trace_functional_monotone"};
  for (std::size_t i = 0; i < names.size(); ++i) {
    CHECK(rep.checks[i].name == names[i]);
    CHECK(rep.checks[i].pass);
  }
  CHECK(rep.all_pass());
  CHECK(rep.checks[0].trials == 1000);
  CHECK(rep.checks[5].trials == 15);

  const BoundReport again = run_all_bound_checks(5, 4, 123);
  for (std::size_t i = 0; i < rep.checks.size(); ++i)
    CHECK(rep.checks[i].observed == again.checks[i].observed);

  const BoundReport other = run_all_bound_checks(5, 4, 124);
  CHECK(other.checks[0].observed != rep.checks[0].observed);
}

}  // namespace
}  // namespace qgibbs
