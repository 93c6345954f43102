#pragma once

#include <complex>
#include <vector>

#include "pnls/grid.hpp"

// The unstable Bloch branch of the cn wave near theta = pi / T.  The
// leading-order dispersion relation
//   A1 A2 lambda^4 + (A1 C2 + A2 C1 - B^2) lambda^2 + C1 C2 = 0
// has closed-form coefficients in K(k), E(k); its discriminant is negative
// for all k in (0,1), so the roots leave the imaginary axis: instability.
// numeric_coeffs recomputes the same coefficients from the discretized
// operators (deflated solves against the twisted L+/-) as a cross-check.

namespace pnls::branch {

using cplx = std::complex<double>;

struct BranchCoeffs {
  double k = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  cplx B;             // purely imaginary in exact arithmetic
  double C1 = 0.0;
  double C2 = 0.0;
  double discriminant = 0.0; // of the quadratic in lambda^2
  cplx lambda1;       // first-quadrant root (zero unless selected)
  cplx b0;            // pairing coefficient at lambda1
  bool lambda_selected = false;
  double residue = 0.0; // largest imaginary part discarded en route
};

// Closed-form coefficients, discriminant, first-quadrant root lambda1 and
// pairing coefficient b0 at modulus k in (0, 1).
BranchCoeffs coeffs(double k);

// The discriminant's own closed form,
//   -16 K^4 E^2 (1-k)^3 (1+k)^3 (K-E)^2 / (k^2 d2^2 d1^2)
// with d1 = E(1-2k^2) - K(1-k^2), d2 = E - (1-k^2)K; used to cross-check
// the assembled quadratic.
double discriminant_closed_form(double k);

// Coefficients recomputed from a discretized real profile u of the wave
// (u'' + a u + b u^3 = 0 sampled over the fundamental period of u^2) via
// the theta = pi/T operators: deflated solves L+ phi1 = phi,
// L- psi1 = psi with phi = exp(-i pi x / T) u, psi = D(theta) phi.
// Throws std::domain_error if a deflation finds more than one near-kernel
// direction.  lambda1 / b0 are not selected here.
BranchCoeffs numeric_coeffs(const grid::Field& u, double a, double b,
                            int fd_order = 4);

struct TangencyPoint {
  double epsilon = 0.0;
  cplx eigenvalue;    // JL(pi/T - epsilon) eigenvalue nearest the prediction
  cplx predicted;     // epsilon * lambda1
  cplx ratio;         // eigenvalue / predicted
  bool matched = false; // within half the predicted magnitude
};

struct TangencyCheck {
  double k = 0.0;
  cplx lambda1;
  std::vector<TangencyPoint> points;
  bool all_matched = false;
};

// Compares JL(theta) spectra at theta = pi/T - epsilon against the linear
// prediction epsilon * lambda1 for each epsilon (cn wave, fundamental
// period of cn^2).
TangencyCheck tangency_check(double k, const std::vector<double>& epsilons,
                             int L, int fd_order = 4);

} // namespace pnls::branch
