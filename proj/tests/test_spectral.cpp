#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "pnls/elliptic.hpp"
#include "pnls/grid.hpp"
#include "pnls/spectral.hpp"
#include "pnls/waves.hpp"

using namespace pnls;
using grid::cplx;
using std::numbers::pi;

namespace {

// Frozen end eigenvalues of the sn-based L+ table at k = 0.9:
// k^2 + 1 -+ 2 sqrt(k^4 - k^2 + 1).
constexpr double kEminus09 = -0.029673884143600055579;
constexpr double kEplus09 = 3.6496738841436000556;

spectral::LinearizationSpec sn_spec(double k, int L, double theta) {
  const auto p = waves::canonical_params(waves::WaveKind::Sn, k);
  const elliptic::EllipticModulus em(k);
  spectral::LinearizationSpec s;
  s.profile = grid::Field(grid::Grid(L, 2.0 * em.K));
  for (int l = 0; l < L; ++l) {
    s.profile.values[l] = elliptic::jacobi(s.profile.grid.node(l), k).sn;
  }
  s.a = p.a;
  s.b = p.b;
  s.theta = theta;
  s.fd_order = 4;
  return s;
}

bool close_to(const cplx& a, const cplx& b, double tol) {
  return std::abs(a - b) <= tol;
}

// multiset match of two spectra within tol
double spectra_gap(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  std::vector<bool> used(b.size(), false);
  for (const auto& x : a) {
    double best = 1e300;
    size_t arg = 0;
    for (size_t i = 0; i < b.size(); ++i) {
      if (!used[i] && std::abs(x - b[i]) < best) {
        best = std::abs(x - b[i]);
        arg = i;
      }
    }
    used[arg] = true;
    worst = std::max(worst, best);
  }
  return worst;
}

} // namespace

TEST_CASE("linearized operators validate their inputs") {
  auto s = sn_spec(0.5, 32, 0.0);
  CHECK_NOTHROW(spectral::build_L(s, spectral::Which::Plus));

  auto bad_theta = s;
  bad_theta.theta = 2.0 * pi / s.profile.grid.period; // one past the cell
  CHECK_THROWS_AS(spectral::build_L(bad_theta, spectral::Which::Plus), std::domain_error);
  bad_theta.theta = -0.1;
  CHECK_THROWS_AS(spectral::build_L(bad_theta, spectral::Which::Plus), std::domain_error);

  auto bad_profile = s;
  bad_profile.profile.values[3] += cplx(0.0, 1e-6);
  CHECK_THROWS_AS(spectral::build_L(bad_profile, spectral::Which::Minus),
                  std::domain_error);

  auto bad_order = s;
  bad_order.fd_order = 3;
  CHECK_THROWS_AS(spectral::build_L(bad_order, spectral::Which::Plus), std::domain_error);
}

TEST_CASE("linearized operators are hermitian, real at zero twist") {
  for (double theta : {0.0, 0.37, 0.9}) {
    const auto s = sn_spec(0.6, 48, theta);
    for (auto w : {spectral::Which::Plus, spectral::Which::Minus}) {
      const auto M = spectral::build_L(s, w);
      CAPTURE(theta);
      CHECK((M - M.adjoint()).cwiseAbs().maxCoeff() < 1e-11);
      if (theta == 0.0) {
        CHECK(M.imag().cwiseAbs().maxCoeff() == 0.0);
      }
    }
  }
}

TEST_CASE("the flow map operator keeps its block structure") {
  const auto s = sn_spec(0.5, 32, 0.3);
  const auto Lp = spectral::build_L(s, spectral::Which::Plus);
  const auto Lm = spectral::build_L(s, spectral::Which::Minus);
  const auto JL = spectral::build_JL(s);
  const int n = 32;
  REQUIRE(JL.rows() == 2 * n);
  CHECK(JL.topLeftCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
  CHECK(JL.bottomRightCorner(n, n).cwiseAbs().maxCoeff() == 0.0);
  CHECK((JL.topRightCorner(n, n) - Lm).cwiseAbs().maxCoeff() == 0.0);
  CHECK((JL.bottomLeftCorner(n, n) + Lp).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense eigenvalue routing agrees with the characteristic polynomial") {
  std::mt19937 rng(2718);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  // complex non-hermitian
  Eigen::MatrixXcd A(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) A(i, j) = cplx(dist(rng), dist(rng));
  auto got = spectral::eigenvalues(A);
  auto want = oracle::charpoly_eigenvalues(A);
  std::sort(want.begin(), want.end(), [](const cplx& x, const cplx& y) {
    return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
  });
  CHECK(spectra_gap(got, want) < 1e-8);

  // real non-symmetric goes through the real path and still matches
  Eigen::MatrixXcd R(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) R(i, j) = dist(rng);
  got = spectral::eigenvalues(R);
  want = oracle::charpoly_eigenvalues(R);
  CHECK(spectra_gap(got, want) < 1e-8);

  // hermitian: self-adjoint path, real spectrum
  Eigen::MatrixXcd H(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) H(i, j) = cplx(dist(rng), dist(rng));
  H = (H + H.adjoint()).eval();
  got = spectral::eigenvalues(H);
  want = oracle::charpoly_eigenvalues(H);
  CHECK(spectra_gap(got, want) < 1e-8);
  for (const auto& ev : got) CHECK(std::abs(ev.imag()) < 1e-12);

  // sorted by (Re, Im)
  for (size_t i = 1; i < got.size(); ++i) {
    const bool ordered = got[i - 1].real() < got[i].real() ||
                         (got[i - 1].real() == got[i].real() &&
                          got[i - 1].imag() <= got[i].imag());
    CHECK(ordered);
  }

  // rotation matrix: purely imaginary pair, exercised through the real path
  Eigen::MatrixXcd rot = Eigen::MatrixXcd::Zero(2, 2);
  rot(0, 1) = 1.0;
  rot(1, 0) = -1.0;
  got = spectral::eigenvalues(rot);
  CHECK(close_to(got[0], cplx(0.0, -1.0), 1e-14));
  CHECK(close_to(got[1], cplx(0.0, 1.0), 1e-14));
}

TEST_CASE("eigensystem returns matching eigenpairs") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::MatrixXcd H(16, 16);
  for (int i = 0; i < 16; ++i)
    for (int j = 0; j < 16; ++j) H(i, j) = cplx(dist(rng), dist(rng));
  H = (H + H.adjoint()).eval();

  const auto sys = spectral::eigensystem(H);
  REQUIRE(sys.values.size() == 16);
  for (int i = 0; i < 16; ++i) {
    const Eigen::VectorXcd v = sys.vectors.col(i);
    CHECK((H * v - sys.values[i] * v).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(v.norm() == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("discrete spectra reproduce the closed-form tables") {
  for (auto kind : {waves::WaveKind::Sn, waves::WaveKind::Cn, waves::WaveKind::Dn}) {
    const auto chk = spectral::lpm_table_check(kind, 0.9, 256, 4);
    CAPTURE(static_cast<int>(kind));
    CHECK(chk.max_error < 1e-5);
    REQUIRE(chk.expected_minus.size() == 3);
    REQUIRE(chk.expected_plus.size() == 5);
    REQUIRE(chk.computed_minus.size() == 3);
    REQUIRE(chk.computed_plus.size() == 5);
  }

  // sn tables carry the frozen entries
  const auto sn = spectral::lpm_table_check(waves::WaveKind::Sn, 0.9, 128, 4);
  CHECK(sn.expected_minus[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(sn.expected_minus[1] == doctest::Approx(-0.81).epsilon(1e-15));
  CHECK(sn.expected_minus[2] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(sn.expected_plus.front() == doctest::Approx(kEminus09).epsilon(1e-13));
  CHECK(sn.expected_plus.back() == doctest::Approx(kEplus09).epsilon(1e-13));

  // the cn and dn tables are rigid shifts of the sn one
  const auto cn = spectral::lpm_table_check(waves::WaveKind::Cn, 0.9, 128, 4);
  const auto dn = spectral::lpm_table_check(waves::WaveKind::Dn, 0.9, 128, 4);
  std::vector<double> shifted;
  for (double v : sn.expected_minus) shifted.push_back(v + 0.81);
  std::sort(shifted.begin(), shifted.end());
  for (size_t i = 0; i < 3; ++i) {
    CHECK(cn.expected_minus[i] == doctest::Approx(shifted[i]).epsilon(1e-13));
  }
  shifted.clear();
  for (double v : sn.expected_minus) shifted.push_back(v + 1.0);
  std::sort(shifted.begin(), shifted.end());
  for (size_t i = 0; i < 3; ++i) {
    CHECK(dn.expected_minus[i] == doctest::Approx(shifted[i]).epsilon(1e-13));
  }

  CHECK_THROWS_AS(spectral::lpm_table_check(waves::WaveKind::Constant, 0.9, 64, 4),
                  std::domain_error);
}

TEST_CASE("the explicit preimages solve their equations on the grid") {
  const auto chk = spectral::lemma_preimage_check(0.9, 256, 4);
  CHECK(chk.residual_plus < 2e-5);
  CHECK(chk.residual_minus < 2e-5);
  CHECK(std::abs(chk.orthogonality) < 1e-8);

  // fourth-order stencil: residuals drop by about 2^4 when L doubles
  const auto fine = spectral::lemma_preimage_check(0.9, 512, 4);
  CHECK(fine.residual_plus < chk.residual_plus / 8.0);
  CHECK(fine.residual_minus < chk.residual_minus / 8.0);
}

TEST_CASE("stable waves get a clean verdict with labeled clusters") {
  const auto rep = spectral::stability_report(waves::WaveKind::Sn, 0.5, 1, 128, 4);
  CHECK(rep.stable);
  CHECK(rep.max_real_part <= rep.tol);
  CHECK(rep.grid.size == 128);

  int total = 0;
  int kernel_mult = 0;
  for (const auto& cl : rep.clusters) {
    total += cl.multiplicity;
    const double share_sum = cl.share[0] + cl.share[1] + cl.share[2] + cl.share[3];
    CHECK(share_sum == doctest::Approx(1.0).epsilon(1e-8));
    if (std::abs(cl.center) <= rep.tol) kernel_mult += cl.multiplicity;
  }
  CHECK(total == 2 * 128);
  // phase and translation symmetries leave a two-dimensional kernel; the
  // discretization may split it across nearby clusters
  CHECK(kernel_mult >= 2);

  // labels stringify
  for (const auto& cl : rep.clusters) {
    CHECK(spectral::to_string(cl.label) != nullptr);
  }
}

TEST_CASE("the dn wave over two periods is spectrally unstable") {
  const auto rep = spectral::stability_report(waves::WaveKind::Dn, 0.95, 2, 384, 4);
  CHECK(!rep.stable);
  CHECK(rep.max_real_part > rep.tol);
  CHECK(rep.grid.period == doctest::Approx(4.0 * elliptic::complete_k(0.95)).epsilon(1e-13));

  int off_axis = 0;
  for (const auto& cl : rep.clusters) {
    if (std::abs(cl.center.real()) > rep.tol) {
      ++off_axis;
      // the unstable pair is real
      CHECK(std::abs(cl.center.imag()) <= rep.tol);
    }
  }
  CHECK(off_axis == 2);

  // spectrum symmetric under both reflections
  double sym_gap = 0.0;
  std::vector<cplx> neg, conj;
  for (const auto& ev : rep.eigenvalues) {
    neg.push_back(-ev);
    conj.push_back(std::conj(ev));
  }
  sym_gap = std::max(spectra_gap(rep.eigenvalues, neg),
                     spectra_gap(rep.eigenvalues, conj));
  CHECK(sym_gap < 1e-7);
}

TEST_CASE("bloch sweeps are ordered, deterministic and validated") {
  const double k = 0.5;
  const elliptic::EllipticModulus em(k);
  const double cell = 2.0 * pi / (2.0 * em.K);
  const std::vector<double> thetas = {0.0, 0.25 * cell, 0.5 * cell, 0.75 * cell};

  const auto one = spectral::bloch_sweep(waves::WaveKind::Cn, k, thetas, 64, 4, 1);
  const auto many = spectral::bloch_sweep(waves::WaveKind::Cn, k, thetas, 64, 4, 3);
  REQUIRE(one.size() == 4);
  REQUIRE(many.size() == 4);
  for (size_t i = 0; i < 4; ++i) {
    CHECK(one[i].theta == thetas[i]);
    REQUIRE(one[i].eigenvalues.size() == 128);
    REQUIRE(many[i].eigenvalues.size() == 128);
    for (size_t j = 0; j < one[i].eigenvalues.size(); ++j) {
      CHECK(one[i].eigenvalues[j] == many[i].eigenvalues[j]);
    }
  }

  // lambda -> -conj(lambda) symmetry holds at every twist
  for (const auto& pt : one) {
    std::vector<cplx> refl;
    for (const auto& ev : pt.eigenvalues) refl.push_back(-std::conj(ev));
    CHECK(spectra_gap(pt.eigenvalues, refl) < 1e-7);
  }

  CHECK_THROWS_AS(spectral::bloch_sweep(waves::WaveKind::Cn, k, {cell}, 64, 4, 1),
                  std::domain_error);
  CHECK_THROWS_AS(spectral::bloch_sweep(waves::WaveKind::Cn, k, {-0.01}, 64, 4, 1),
                  std::domain_error);
  CHECK(spectral::bloch_sweep(waves::WaveKind::Cn, k, {}, 64, 4, 1).empty());
}
