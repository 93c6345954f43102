#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pnls/grid.hpp"

using namespace pnls;
using grid::cplx;
using std::numbers::pi;

namespace {

grid::Field random_field(const grid::Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  grid::Field f(g);
  for (auto& v : f.values) v = cplx(dist(rng), dist(rng));
  return f;
}

// Direct O(L^2) transform straight from the definition, as the oracle.
grid::FourierCoeffs dft_direct(const grid::Field& f) {
  const int L = f.grid.size;
  grid::FourierCoeffs out;
  out.grid = f.grid;
  out.c.resize(L);
  for (int j = -L / 2; j < L / 2; ++j) {
    cplx acc = 0.0;
    for (int l = 0; l < L; ++l) {
      const double arg = -2.0 * pi * j * f.grid.node(l) / f.grid.period;
      acc += f.values[l] * std::polar(1.0, arg);
    }
    out.at(j) = acc / static_cast<double>(L);
  }
  return out;
}

double max_coeff_err(const grid::FourierCoeffs& a, const grid::FourierCoeffs& b) {
  double m = 0.0;
  for (int j = a.lowest(); j <= a.highest(); ++j) {
    m = std::max(m, std::abs(a.at(j) - b.at(j)));
  }
  return m;
}

} // namespace

TEST_CASE("grid validation and geometry") {
  CHECK_THROWS_AS(grid::Grid(7, 1.0), std::domain_error);
  CHECK_THROWS_AS(grid::Grid(0, 1.0), std::domain_error);
  CHECK_THROWS_AS(grid::Grid(-4, 1.0), std::domain_error);
  CHECK_THROWS_AS(grid::Grid(8, 0.0), std::domain_error);
  CHECK_THROWS_AS(grid::Grid(8, -2.0), std::domain_error);

  const grid::Grid g(8, 4.0);
  CHECK(g.dx() == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(g.node(0) == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK(g.node(4) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(g.node(7) == doctest::Approx(1.5).epsilon(1e-15));
}

TEST_CASE("dft matches the direct transform, power of two and not") {
  for (int L : {16, 12, 64, 10}) {
    const grid::Grid g(L, 3.7);
    const auto f = random_field(g, 100 + L);
    const auto fast = grid::dft(f);
    const auto slow = dft_direct(f);
    CAPTURE(L);
    CHECK(max_coeff_err(fast, slow) < 1e-13);
  }
}

TEST_CASE("dft and idft invert each other") {
  const grid::Grid g(64, 2.0 * pi);
  const auto f = random_field(g, 7);
  const auto back = grid::idft(grid::dft(f));
  double err = 0.0;
  for (int l = 0; l < g.size; ++l) err = std::max(err, std::abs(back.values[l] - f.values[l]));
  CHECK(err < 1e-13);
}

TEST_CASE("dft isolates pure modes including negative ones") {
  const grid::Grid g(32, 5.0);
  for (int j0 : {0, 3, -5, 15, -16}) {
    grid::Field f(g);
    for (int l = 0; l < g.size; ++l) {
      f.values[l] = std::polar(1.0, 2.0 * pi * j0 * g.node(l) / g.period);
    }
    const auto c = grid::dft(f);
    CAPTURE(j0);
    for (int j = c.lowest(); j <= c.highest(); ++j) {
      const cplx want = (j == j0) ? cplx(1.0) : cplx(0.0);
      CHECK(std::abs(c.at(j) - want) < 1e-13);
    }
  }
}

TEST_CASE("dft of a constant sits entirely in mode zero") {
  const grid::Grid g(16, 1.0);
  grid::Field f(g);
  for (auto& v : f.values) v = cplx(2.5, -1.0);
  const auto c = grid::dft(f);
  CHECK(std::abs(c.at(0) - cplx(2.5, -1.0)) < 1e-15);
  for (int j = c.lowest(); j <= c.highest(); ++j) {
    if (j != 0) CHECK(std::abs(c.at(j)) < 1e-15);
  }
}

TEST_CASE("parseval holds for the chosen normalization") {
  const grid::Grid g(64, 3.0);
  const auto f = random_field(g, 42);
  const auto c = grid::dft(f);
  double left = 0.0, right = 0.0;
  for (const auto& v : f.values) left += std::norm(v);
  for (const auto& v : c.c) right += std::norm(v);
  CHECK(left / g.size == doctest::Approx(right).epsilon(1e-13));
}

TEST_CASE("derivative matrices act on circulant eigenvectors exactly") {
  const grid::Grid g(24, 2.9);
  const double dx = g.dx();
  for (int j : {1, 5, -7}) {
    const double t = 2.0 * pi * j / g.size;
    Eigen::VectorXcd v(g.size);
    for (int l = 0; l < g.size; ++l) v(l) = std::polar(1.0, t * l);

    const Eigen::VectorXcd d1o2 = grid::derivative_matrix(g, 1, 2).dense * v;
    const cplx ev1o2 = cplx(0.0, std::sin(t) / dx);
    const Eigen::VectorXcd d1o4 = grid::derivative_matrix(g, 1, 4).dense * v;
    const cplx ev1o4 = cplx(0.0, (16.0 * std::sin(t) - 2.0 * std::sin(2.0 * t)) / (12.0 * dx));
    const Eigen::VectorXcd d2o2 = grid::derivative_matrix(g, 2, 2).dense * v;
    const cplx ev2o2 = cplx((2.0 * std::cos(t) - 2.0) / (dx * dx));
    const Eigen::VectorXcd d2o4 = grid::derivative_matrix(g, 2, 4).dense * v;
    const cplx ev2o4 =
        cplx((-2.0 * std::cos(2.0 * t) + 32.0 * std::cos(t) - 30.0) / (12.0 * dx * dx));

    CAPTURE(j);
    CHECK((d1o2 - ev1o2 * v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d1o4 - ev1o4 * v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d2o2 - ev2o2 * v).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((d2o4 - ev2o4 * v).cwiseAbs().maxCoeff() < 1e-11);
  }
}

TEST_CASE("derivative matrices converge at their stencil order") {
  auto error_for = [](int L, int degree, int order) {
    const grid::Grid g(L, 2.0 * pi);
    const auto D = grid::derivative_matrix(g, degree, order).dense;
    Eigen::VectorXcd v(L), exact(L);
    for (int l = 0; l < L; ++l) {
      const double x = g.node(l);
      v(l) = std::sin(2.0 * x);
      exact(l) = (degree == 1) ? 2.0 * std::cos(2.0 * x) : -4.0 * std::sin(2.0 * x);
    }
    return ((D * v) - exact).cwiseAbs().maxCoeff();
  };
  for (int degree : {1, 2}) {
    for (int order : {2, 4}) {
      const double e1 = error_for(32, degree, order);
      const double e2 = error_for(64, degree, order);
      const double rate = std::log2(e1 / e2);
      CAPTURE(degree);
      CAPTURE(order);
      CHECK(rate > order - 0.2);
      CHECK(rate < order + 0.2);
    }
  }
}

TEST_CASE("twisted derivative matrices are (anti-)hermitian and shift the symbol") {
  const grid::Grid g(32, 4.1);
  const double theta = 0.45;

  const auto D1 = grid::derivative_matrix(g, 1, 4, theta).dense;
  CHECK((D1 + D1.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  const auto D2 = grid::derivative_matrix(g, 2, 4, theta).dense;
  CHECK((D2 - D2.adjoint()).cwiseAbs().maxCoeff() < 1e-12);

  // degree 1 with a twist is the untwisted matrix plus i theta.
  const auto D1_0 = grid::derivative_matrix(g, 1, 4).dense;
  Eigen::MatrixXcd want = D1_0 + cplx(0.0, theta) * Eigen::MatrixXcd::Identity(g.size, g.size);
  CHECK((D1 - want).cwiseAbs().maxCoeff() < 1e-12);

  // degree 2 composes as D2 + 2 i theta D1 - theta^2.
  const auto D2_0 = grid::derivative_matrix(g, 2, 4).dense;
  want = D2_0 + cplx(0.0, 2.0 * theta) * D1_0 -
         theta * theta * Eigen::MatrixXcd::Identity(g.size, g.size);
  CHECK((D2 - want).cwiseAbs().maxCoeff() < 1e-12);

  CHECK_THROWS_AS(grid::derivative_matrix(g, 3, 2), std::domain_error);
  CHECK_THROWS_AS(grid::derivative_matrix(g, 1, 6), std::domain_error);
}

TEST_CASE("antiperiodic projection kills even modes and fixes odd ones") {
  const grid::Grid g(32, 2.2);
  const auto f = random_field(g, 11);
  const auto before = grid::dft(f);
  const auto proj = grid::project_antiperiodic(f);
  const auto after = grid::dft(proj);
  for (int j = after.lowest(); j <= after.highest(); ++j) {
    if ((j % 2 + 2) % 2 == 0) {
      CHECK(std::abs(after.at(j)) < 1e-14);
    } else {
      CHECK(std::abs(after.at(j) - before.at(j)) < 1e-14);
    }
  }
  // idempotent
  const auto twice = grid::project_antiperiodic(proj);
  for (int l = 0; l < g.size; ++l) {
    CHECK(std::abs(twice.values[l] - proj.values[l]) < 1e-15);
  }
}

TEST_CASE("symmetry projections decompose the identity") {
  const grid::Grid g(16, 3.3);
  const auto f = random_field(g, 23);

  const auto p = grid::project_symmetry(f, grid::Symmetry::PeriodicHalf);
  const auto a = grid::project_symmetry(f, grid::Symmetry::AntiperiodicHalf);
  const auto e = grid::project_symmetry(f, grid::Symmetry::Even);
  const auto o = grid::project_symmetry(f, grid::Symmetry::Odd);

  for (int l = 0; l < g.size; ++l) {
    CHECK(std::abs(p.values[l] + a.values[l] - f.values[l]) < 1e-14);
    CHECK(std::abs(e.values[l] + o.values[l] - f.values[l]) < 1e-14);
  }

  for (auto s : {grid::Symmetry::PeriodicHalf, grid::Symmetry::AntiperiodicHalf,
                 grid::Symmetry::Even, grid::Symmetry::Odd}) {
    const auto once = grid::project_symmetry(f, s);
    const auto twice = grid::project_symmetry(once, s);
    for (int l = 0; l < g.size; ++l) {
      CHECK(std::abs(twice.values[l] - once.values[l]) < 1e-14);
    }
  }
}

TEST_CASE("symmetry projections recognize trigonometric parities") {
  const grid::Grid g(64, 2.0 * pi);
  grid::Field fcos(g), fsin(g);
  for (int l = 0; l < g.size; ++l) {
    fcos.values[l] = std::cos(g.node(l));
    fsin.values[l] = std::sin(g.node(l));
  }

  const auto even_of_cos = grid::project_symmetry(fcos, grid::Symmetry::Even);
  const auto odd_of_cos = grid::project_symmetry(fcos, grid::Symmetry::Odd);
  const auto anti_of_cos = grid::project_symmetry(fcos, grid::Symmetry::AntiperiodicHalf);
  for (int l = 0; l < g.size; ++l) {
    CHECK(std::abs(even_of_cos.values[l] - fcos.values[l]) < 1e-14);
    CHECK(std::abs(odd_of_cos.values[l]) < 1e-14);
    // cos x flips sign under x -> x + pi, so it is antiperiodic on [0, 2 pi).
    CHECK(std::abs(anti_of_cos.values[l] - fcos.values[l]) < 1e-14);
  }

  const auto odd_of_sin = grid::project_symmetry(fsin, grid::Symmetry::Odd);
  const auto even_of_sin = grid::project_symmetry(fsin, grid::Symmetry::Even);
  for (int l = 0; l < g.size; ++l) {
    CHECK(std::abs(odd_of_sin.values[l] - fsin.values[l]) < 1e-14);
    CHECK(std::abs(even_of_sin.values[l]) < 1e-14);
  }
}
