#include "pnls/waves.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pnls/elliptic.hpp"

namespace pnls::waves {
namespace {

using elliptic::EllipticModulus;
using std::numbers::pi;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

bool is_elliptic(WaveKind kind) {
  return kind == WaveKind::Dn || kind == WaveKind::Cn || kind == WaveKind::Sn;
}

// Mass at modulus k for the member of the family with coefficient b and
// period T (alpha, beta implied by the scaling relations).
double family_mass(WaveKind kind, double k, double b, double T) {
  const EllipticModulus em(k);
  switch (kind) {
    case WaveKind::Dn:
      return 4.0 * em.K * em.E / (b * T);
    case WaveKind::Cn:
      return 16.0 * em.K * (em.E - (1.0 - k * k) * em.K) / (b * T);
    default: // Sn
      return 16.0 * em.K * (em.K - em.E) / (std::abs(b) * T);
  }
}

} // namespace

WaveParams canonical_params(WaveKind kind, double k) {
  require(is_elliptic(kind), "canonical_params: elliptic families only");
  require(k > 0.0 && k < 1.0, "canonical_params: modulus must lie in (0,1)");
  const EllipticModulus em(k);
  WaveParams p;
  p.kind = kind;
  p.k = k;
  p.alpha = 1.0;
  p.beta = 1.0;
  switch (kind) {
    case WaveKind::Dn:
      p.a = -(2.0 - k * k);
      p.b = 2.0;
      p.period = 2.0 * em.K;
      break;
    case WaveKind::Cn:
      p.a = 1.0 - 2.0 * k * k;
      p.b = 2.0 * k * k;
      p.period = 4.0 * em.K;
      break;
    default: // Sn
      p.a = 1.0 + k * k;
      p.b = -2.0 * k * k;
      p.period = 4.0 * em.K;
      break;
  }
  return p;
}

WaveParams constant_params(double b, double period, double mass) {
  require(period > 0.0, "constant_params: period must be positive");
  require(mass > 0.0, "constant_params: mass must be positive");
  WaveParams p;
  p.kind = WaveKind::Constant;
  p.alpha = std::sqrt(period / (2.0 * mass));
  p.beta = 1.0;
  p.b = b;
  p.a = -2.0 * b * mass / period;
  p.period = period;
  return p;
}

WaveParams plane_wave_params(double b, double period, double mass, int q) {
  WaveParams p = constant_params(b, period, mass);
  p.kind = WaveKind::PlaneWave;
  p.q = q;
  const double mu = 2.0 * pi * q / period;
  p.a = mu * mu - 2.0 * b * mass / period;
  return p;
}

double mass_of(const WaveParams& p) {
  if (p.kind == WaveKind::Constant || p.kind == WaveKind::PlaneWave) {
    return p.period / (2.0 * p.alpha * p.alpha);
  }
  return family_mass(p.kind, p.k, p.b, p.period);
}

double modulus_from_mass(WaveKind kind, double b, double period, double mass) {
  require(is_elliptic(kind), "modulus_from_mass: elliptic families only");
  require(period > 0.0, "modulus_from_mass: period must be positive");
  require(mass > 0.0, "modulus_from_mass: mass must be positive");
  if (kind == WaveKind::Sn) {
    require(b < 0.0, "modulus_from_mass: sn family needs b < 0");
  } else {
    require(b > 0.0, "modulus_from_mass: dn/cn families need b > 0");
  }

  double lo = 1e-9, hi = 1.0 - 1e-9;
  // family_mass is increasing in k on (0,1) for all three families; the dn
  // branch starts at the constant-state mass pi^2/(bT) instead of zero.
  if (family_mass(kind, lo, b, period) > mass ||
      family_mass(kind, hi, b, period) < mass) {
    throw std::domain_error("modulus_from_mass: no wave of this family attains the requested mass");
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (family_mass(kind, mid, b, period) <= mass ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

WaveParams params_from_mass(WaveKind kind, double b, double period, double mass) {
  const double k = modulus_from_mass(kind, b, period, mass);
  const EllipticModulus em(k);
  WaveParams p;
  p.kind = kind;
  p.k = k;
  p.b = b;
  p.period = period;
  switch (kind) {
    case WaveKind::Dn:
      p.beta = period / (2.0 * em.K);
      p.alpha = p.beta * std::sqrt(b / 2.0);
      p.a = -(2.0 - k * k) / (p.beta * p.beta);
      break;
    case WaveKind::Cn:
      p.beta = period / (4.0 * em.K);
      p.alpha = (p.beta / k) * std::sqrt(b / 2.0);
      p.a = (1.0 - 2.0 * k * k) / (p.beta * p.beta);
      break;
    default: // Sn
      p.beta = period / (4.0 * em.K);
      p.alpha = (p.beta / k) * std::sqrt(-b / 2.0);
      p.a = (1.0 + k * k) / (p.beta * p.beta);
      break;
  }
  return p;
}

double critical_modulus() {
  // K(k) = 2 E(k) separates the dn-like and cn-like minimizer regimes;
  // K - 2E is increasing and changes sign once.
  double lo = 1e-9, hi = 1.0 - 1e-9;
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    const EllipticModulus em(mid);
    (em.K - 2.0 * em.E < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

grid::Field profile_samples(const WaveParams& p, const grid::Grid& g,
                            const SampleOptions& opts) {
  require(std::abs(g.period - p.period) <= 1e-9 * p.period,
          "profile_samples: grid period does not match the wave's period");
  grid::Field f(g);
  const grid::cplx phase = std::polar(1.0, opts.phase);
  const grid::cplx scale = phase / p.alpha;
  switch (p.kind) {
    case WaveKind::Constant:
      for (auto& v : f.values) v = scale;
      break;
    case WaveKind::PlaneWave: {
      const double mu = 2.0 * pi * p.q / p.period;
      for (int l = 0; l < g.size; ++l) {
        f.values[l] = scale * std::polar(1.0, mu * (g.node(l) - opts.shift));
      }
      break;
    }
    default: {
      const double quarter = (opts.sn_quarter_shift && p.kind == WaveKind::Sn)
                                 ? elliptic::complete_k(p.k)
                                 : 0.0;
      for (int l = 0; l < g.size; ++l) {
        const double y = (g.node(l) - opts.shift) / p.beta;
        const auto j = elliptic::jacobi(y + quarter, p.k);
        double v = 0.0;
        switch (p.kind) {
          case WaveKind::Dn: v = j.dn; break;
          case WaveKind::Cn: v = j.cn; break;
          default: v = j.sn; break;
        }
        f.values[l] = scale * v;
      }
      break;
    }
  }
  return f;
}

} // namespace pnls::waves
