#include "pnls/elliptic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pnls::elliptic {
namespace {

constexpr int kMaxAgm = 32;
constexpr double kAgmTol = 1e-16;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Carlson symmetric integrals by the duplication theorem; the remaining
// spread after duplication is pushed below 1e-10, so the truncated Taylor
// tail contributes < 1e-15 relative error.
double carlson_rf(double x, double y, double z) {
  double mu = (x + y + z) / 3.0;
  for (int i = 0; i < 200; ++i) {
    const double lam = std::sqrt(x) * std::sqrt(y) + std::sqrt(y) * std::sqrt(z) +
                       std::sqrt(z) * std::sqrt(x);
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
    mu = (x + y + z) / 3.0;
    const double eps =
        std::max({std::abs(x - mu), std::abs(y - mu), std::abs(z - mu)}) / mu;
    if (eps < 1e-10) break;
  }
  const double X = 1.0 - x / mu, Y = 1.0 - y / mu, Z = 1.0 - z / mu;
  const double e2 = X * Y - Z * Z;
  const double e3 = X * Y * Z;
  return (1.0 - e2 / 10.0 + e3 / 14.0 + e2 * e2 / 24.0 - 3.0 * e2 * e3 / 44.0) /
         std::sqrt(mu);
}

double carlson_rd(double x, double y, double z) {
  double sum = 0.0, fac = 1.0;
  double mu = (x + y + 3.0 * z) / 5.0;
  for (int i = 0; i < 200; ++i) {
    const double lam = std::sqrt(x) * std::sqrt(y) + std::sqrt(y) * std::sqrt(z) +
                       std::sqrt(z) * std::sqrt(x);
    sum += fac / (std::sqrt(z) * (z + lam));
    fac *= 0.25;
    x = 0.25 * (x + lam);
    y = 0.25 * (y + lam);
    z = 0.25 * (z + lam);
    mu = (x + y + 3.0 * z) / 5.0;
    const double eps =
        std::max({std::abs(x - mu), std::abs(y - mu), std::abs(z - mu)}) / mu;
    if (eps < 1e-10) break;
  }
  const double X = 1.0 - x / mu, Y = 1.0 - y / mu;
  const double Z = -(X + Y) / 3.0;
  const double ea = X * Y - 6.0 * Z * Z;
  const double eb = (3.0 * X * Y - 8.0 * Z * Z) * Z;
  const double ec = 3.0 * (X * Y - Z * Z) * Z * Z;
  const double ed = X * Y * Z * Z * Z;
  const double series = 1.0 - 3.0 * ea / 14.0 + eb / 6.0 + 9.0 * ea * ea / 88.0 -
                        3.0 * ec / 22.0 - 9.0 * ed / 52.0 + 3.0 * eb * Z / 26.0;
  return 3.0 * sum + fac * series / (mu * std::sqrt(mu));
}

// Incomplete second integral for |phi| <= pi/2 via the Carlson forms.
double incomplete_e(double phi, double k) {
  const double s = std::sin(phi);
  const double c = std::cos(phi);
  if (std::abs(s) < 1e-300) return 0.0;
  const double m = k * k;
  const double q = 1.0 - m * s * s;
  return s * carlson_rf(c * c, q, 1.0) -
         (m / 3.0) * s * s * s * carlson_rd(c * c, q, 1.0);
}

// Amplitude phi_0 = am(u, k) for |u| <= K by the descending AGM ladder:
// forward to negligible c_N, phi_N = 2^N a_N u, then
// phi_{n-1} = (phi_n + asin((c_n / a_n) sin phi_n)) / 2.
double amplitude(double u, double k) {
  double a[kMaxAgm + 1], c[kMaxAgm + 1];
  a[0] = 1.0;
  c[0] = k;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  int n = 0;
  while (n < kMaxAgm && std::abs(c[n]) > kAgmTol * a[n]) {
    const double an = 0.5 * (a[n] + b);
    const double cn = 0.5 * (a[n] - b);
    b = std::sqrt(a[n] * b);
    ++n;
    a[n] = an;
    c[n] = cn;
  }
  double phi = std::ldexp(a[n], n) * u;
  for (int j = n; j >= 1; --j) {
    phi = 0.5 * (phi + std::asin(std::clamp(c[j] / a[j] * std::sin(phi), -1.0, 1.0)));
  }
  return phi;
}

} // namespace

double complete_k(double k) {
  require(k >= 0.0 && k < 1.0, "complete_k: modulus must satisfy 0 <= k < 1");
  double a = 1.0, b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < kMaxAgm && std::abs(a - b) > kAgmTol; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return std::numbers::pi / (2.0 * a);
}

double complete_e(double k) {
  require(k >= 0.0 && k <= 1.0, "complete_e: modulus must satisfy 0 <= k <= 1");
  if (k == 1.0) return 1.0;
  double a = 1.0, b = std::sqrt((1.0 - k) * (1.0 + k));
  double sum = 0.5 * k * k; // 2^(n-1) c_n^2 at n = 0
  double pow2 = 0.5;
  for (int i = 0; i < kMaxAgm && std::abs(a - b) > kAgmTol; ++i) {
    const double cn = 0.5 * (a - b);
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
    pow2 *= 2.0;
    sum += pow2 * cn * cn;
  }
  return std::numbers::pi / (2.0 * a) * (1.0 - sum);
}

JacobiPoint jacobi(double x, double k) {
  require(k >= 0.0 && k <= 1.0, "jacobi: modulus must satisfy 0 <= k <= 1");
  if (k == 0.0) return {std::sin(x), std::cos(x), 1.0};
  if (k == 1.0) {
    const double sech = 1.0 / std::cosh(x);
    return {std::tanh(x), sech, sech};
  }
  const double K = complete_k(k);
  // Reduce modulo 4K, then fold into [0, K]:
  //   sn(4K - t) = -sn(t), cn(4K - t) = cn(t)   (reflection at 2K)
  //   sn(2K - t) =  sn(t), cn(2K - t) = -cn(t)  (reflection at K)
  // dn is invariant under both reflections.
  double t = std::fmod(x, 4.0 * K);
  if (t < 0.0) t += 4.0 * K;
  double sn_sign = 1.0, cn_sign = 1.0;
  if (t > 2.0 * K) {
    t = 4.0 * K - t;
    sn_sign = -1.0;
  }
  if (t > K) {
    t = 2.0 * K - t;
    cn_sign = -1.0;
  }
  const double phi = amplitude(t, k);
  const double sn = std::sin(phi);
  const double cn = std::cos(phi);
  // dn never vanishes for k < 1, so the positive root is always correct.
  const double dn = std::sqrt(std::max(0.0, 1.0 - k * k * sn * sn));
  return {sn_sign * sn, cn_sign * cn, dn};
}

double jacobi_epsilon(double x, double k) {
  require(k >= 0.0 && k < 1.0, "jacobi_epsilon: modulus must satisfy 0 <= k < 1");
  if (k == 0.0) return x;
  const double K = complete_k(k);
  const double E = complete_e(k);
  // eps(x + 2nK) = eps(x) + 2nE; the remainder lands in [-K, K) where the
  // amplitude stays within [-pi/2, pi/2) and the incomplete integral applies.
  const double n = std::floor((x + K) / (2.0 * K));
  const double t = x - 2.0 * K * n;
  const double sn = jacobi(t, k).sn;
  const double phi = std::asin(std::clamp(sn, -1.0, 1.0));
  return incomplete_e(phi, k) + 2.0 * E * n;
}

EllipticModulus::EllipticModulus(double modulus)
    : k(modulus), K(complete_k(modulus)), E(complete_e(modulus)) {}

} // namespace pnls::elliptic
