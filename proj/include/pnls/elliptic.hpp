#pragma once

#include <stdexcept>

// Complete elliptic integrals and Jacobi elliptic functions, parameterized
// by the modulus k (not the parameter m = k^2).  Everything is plain double
// precision; domain violations throw std::domain_error.

namespace pnls::elliptic {

// Complete integral of the first kind K(k), 0 <= k < 1.  AGM iteration,
// stopping when successive means agree to 1e-16 (capped at 32 rounds).
double complete_k(double k);

// Complete integral of the second kind E(k), 0 <= k <= 1.  Same AGM pass
// with the 2^(n-1) c_n^2 correction sum; E(1) = 1 exactly.
double complete_e(double k);

struct JacobiPoint {
  double sn;
  double cn;
  double dn;
};

// sn, cn, dn at real x, 0 <= k <= 1 (k = 1 degenerates to tanh / sech).
// x is reduced modulo the 4K period and folded into [0, K] by the
// reflection identities before the descending Landen recurrence, so large
// arguments do not lose accuracy.
JacobiPoint jacobi(double x, double k);

// Jacobi epsilon: integral of dn^2(t,k) over t in [0, x], 0 <= k < 1.
// Quasi-periodic reduction (value advances by 2E per 2K in x) plus Carlson
// symmetric forms on the remainder; no library incomplete integral is used.
double jacobi_epsilon(double x, double k);

// Modulus with its complete integrals attached; validates 0 <= k < 1 once.
struct EllipticModulus {
  double k;
  double K;
  double E;
  explicit EllipticModulus(double modulus);
};

} // namespace pnls::elliptic
