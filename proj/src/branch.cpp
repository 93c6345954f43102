#include "pnls/branch.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pnls/elliptic.hpp"
#include "pnls/spectral.hpp"
#include "pnls/waves.hpp"

namespace pnls::branch {
namespace {

using elliptic::EllipticModulus;
using std::numbers::pi;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Denominators shared by every coefficient; both stay bounded away from
// zero on (0,1) but are guarded anyway.
void denominators(const EllipticModulus& em, double& d1, double& d2) {
  const double m = em.k * em.k;
  d1 = em.E * (1.0 - 2.0 * m) - em.K * (1.0 - m);
  d2 = em.E - (1.0 - m) * em.K;
  const double scale = std::max(1.0, em.K * em.K);
  require(std::abs(d1) > 1e-12 * scale && std::abs(d2) > 1e-12 * scale,
          "branch coefficients: degenerate denominator");
}

// Roots of A1 A2 z^2 + (A1 C2 + A2 C1 - B^2) z + C1 C2 = 0 in z = lambda^2,
// then the first-quadrant fourth root.
void select_lambda(BranchCoeffs& c) {
  const double bim = c.B.imag();
  const double q = c.A1 * c.C2 + c.A2 * c.C1 + bim * bim;
  const double lead = c.A1 * c.A2;
  c.discriminant = q * q - 4.0 * lead * c.C1 * c.C2;
  const cplx sq = std::sqrt(cplx(c.discriminant, 0.0));
  const cplx z1 = (-q + sq) / (2.0 * lead);
  const cplx z2 = (-q - sq) / (2.0 * lead);
  c.lambda_selected = false;
  for (const cplx z : {z1, z2}) {
    for (const cplx root : {std::sqrt(z), -std::sqrt(z)}) {
      if (root.real() > 1e-12 && root.imag() > 1e-12) {
        c.lambda1 = root;
        c.lambda_selected = true;
      }
    }
  }
  if (c.lambda_selected) {
    const cplx denom = c.B * c.lambda1;
    if (std::abs(denom) > 1e-300) {
      c.b0 = -(c.A1 * c.lambda1 * c.lambda1 + c.C1) / denom;
    }
  }
}

} // namespace

BranchCoeffs coeffs(double k) {
  require(k > 0.0 && k < 1.0, "branch coefficients: modulus must lie in (0,1)");
  const EllipticModulus em(k);
  const double K = em.K, E = em.E, m = k * k;
  double d1, d2;
  denominators(em, d1, d2);

  BranchCoeffs c;
  c.k = k;
  const double num = m * K * (2.0 * E - K) + (E - K) * (E - K);
  c.A1 = num / (2.0 * m * d1);
  c.A2 = num / (2.0 * m * d2);
  c.B = cplx(0.0, -2.0 * E * K * (k - 1.0) * (k + 1.0) * (K - E) / (d1 * d2));
  c.C1 = 2.0 * K * K * (k - 1.0) * (k + 1.0) / d2;
  c.C2 = 2.0 * K * K * (k - 1.0) * (k + 1.0) / d1;
  select_lambda(c);
  return c;
}

double discriminant_closed_form(double k) {
  require(k > 0.0 && k < 1.0, "branch discriminant: modulus must lie in (0,1)");
  const EllipticModulus em(k);
  const double K = em.K, E = em.E;
  double d1, d2;
  denominators(em, d1, d2);
  const double omk = 1.0 - k, opk = 1.0 + k;
  const double num = 16.0 * std::pow(K, 4) * E * E * std::pow(omk, 3) *
                     std::pow(opk, 3) * (K - E) * (K - E);
  return -num / (k * k * d2 * d2 * d1 * d1);
}

BranchCoeffs numeric_coeffs(const grid::Field& u, double a, double b,
                            int fd_order) {
  const auto& g = u.grid;
  require(g.size >= 8, "numeric branch coefficients: grid too small");
  const double T = g.period;
  const double theta = pi / T;
  const double dx = g.dx();

  spectral::LinearizationSpec spec{u, a, b, theta, fd_order};
  const Eigen::MatrixXcd Lp = spectral::build_L(spec, spectral::Which::Plus);
  const Eigen::MatrixXcd Lm = spectral::build_L(spec, spectral::Which::Minus);
  const Eigen::MatrixXcd D = grid::derivative_matrix(g, 1, fd_order, theta).dense;

  Eigen::VectorXcd phi(g.size);
  for (int l = 0; l < g.size; ++l) {
    phi(l) = std::polar(1.0, -theta * g.node(l)) * u.values[l].real();
  }
  const Eigen::VectorXcd psi = D * phi;
  const Eigen::VectorXcd Dpsi = D * psi;

  // Pseudoinverse apply through the Hermitian eigendecomposition; exactly
  // one near-kernel direction is deflated, more than one is an error.
  auto deflated_solve = [&](const Eigen::MatrixXcd& M, const Eigen::VectorXcd& rhs) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("numeric branch coefficients: eigendecomposition failed");
    }
    const auto& w = es.eigenvalues();
    const double cutoff = 1e-8 * w.cwiseAbs().maxCoeff();
    int kernel = 0;
    Eigen::VectorXd inv(w.size());
    for (int i = 0; i < w.size(); ++i) {
      if (std::abs(w(i)) < cutoff) {
        inv(i) = 0.0;
        ++kernel;
      } else {
        inv(i) = 1.0 / w(i);
      }
    }
    if (kernel > 1) {
      throw std::domain_error(
          "numeric branch coefficients: deflation found a multidimensional kernel");
    }
    return Eigen::VectorXcd(es.eigenvectors() *
                            (inv.asDiagonal() * (es.eigenvectors().adjoint() * rhs)));
  };

  const Eigen::VectorXcd phi1 = deflated_solve(Lp, phi);
  const Eigen::VectorXcd psi1 = deflated_solve(Lm, psi);
  const Eigen::VectorXcd eta = deflated_solve(Lp, Dpsi);

  // <f, g> = dx sum f conj(g)
  auto ip = [dx](const Eigen::VectorXcd& f, const Eigen::VectorXcd& gg) {
    return cplx(dx * (gg.adjoint() * f)(0, 0));
  };

  BranchCoeffs c;
  c.k = 0.0;
  const cplx a1 = ip(phi1, phi);
  const cplx a2 = ip(psi1, psi);
  const cplx bb = cplx(0.0, 2.0) * (ip(phi1, Dpsi) - a2);
  const cplx c1 = ip(phi, phi) - 4.0 * a2;
  const cplx c2 = ip(psi, psi) - 4.0 * ip(eta, Dpsi);
  c.A1 = a1.real();
  c.A2 = a2.real();
  c.B = bb;
  c.C1 = c1.real();
  c.C2 = c2.real();
  c.residue = std::max({std::abs(a1.imag()), std::abs(a2.imag()),
                        std::abs(c1.imag()), std::abs(c2.imag()),
                        std::abs(bb.real())});
  const double bim = c.B.imag();
  const double q = c.A1 * c.C2 + c.A2 * c.C1 + bim * bim;
  c.discriminant = q * q - 4.0 * c.A1 * c.A2 * c.C1 * c.C2;
  return c;
}

TangencyCheck tangency_check(double k, const std::vector<double>& epsilons,
                             int L, int fd_order) {
  const BranchCoeffs c = coeffs(k);
  require(c.lambda_selected, "tangency check: no first-quadrant root");

  const auto params = waves::canonical_params(waves::WaveKind::Cn, k);
  const EllipticModulus em(k);
  const grid::Grid g(L, 2.0 * em.K); // fundamental period of cn^2
  const double edge = pi / g.period;

  grid::Field u(g);
  for (int l = 0; l < g.size; ++l) {
    u.values[l] = elliptic::jacobi(g.node(l), k).cn;
  }

  TangencyCheck out;
  out.k = k;
  out.lambda1 = c.lambda1;
  out.all_matched = true;
  for (double eps : epsilons) {
    require(eps > 0.0 && eps < edge, "tangency check: epsilon must lie in (0, pi/T)");
    spectral::LinearizationSpec spec{u, params.a, params.b, edge - eps, fd_order};
    const auto evs = spectral::eigenvalues(spectral::build_JL(spec));
    TangencyPoint pt;
    pt.epsilon = eps;
    pt.predicted = eps * c.lambda1;
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ev : evs) {
      const double d = std::abs(ev - pt.predicted);
      if (d < best) {
        best = d;
        pt.eigenvalue = ev;
      }
    }
    pt.matched = best <= 0.5 * std::abs(pt.predicted);
    pt.ratio = pt.eigenvalue / pt.predicted;
    out.points.push_back(pt);
    out.all_matched = out.all_matched && pt.matched;
  }
  return out;
}

} // namespace pnls::branch
