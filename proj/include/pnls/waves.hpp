#pragma once

#include "pnls/grid.hpp"

// Standing-wave families of the cubic Schrodinger equation on the line,
// u'' + a u + b u^3 = 0 with period T: the three elliptic profiles
// (1/alpha) dn(x/beta), (1/alpha) cn(x/beta), (1/alpha) sn(x/beta), plus the
// constant and plane-wave solutions.  Parameters are tied together by the
// scaling relations b beta^2 = 2 alpha^2 (dn), 2 k^2 alpha^2 (cn),
// -2 k^2 alpha^2 (sn) and the matching values of a beta^2.

namespace pnls::waves {

enum class WaveKind { Dn, Cn, Sn, Constant, PlaneWave };

struct WaveParams {
  WaveKind kind = WaveKind::Dn;
  double k = 0.0;     // elliptic modulus; 0 for constant / plane wave
  double a = 0.0;     // linear coefficient in u'' + a u + b u^3 = 0
  double b = 0.0;     // cubic coefficient
  double alpha = 1.0; // amplitude scale 1/alpha
  double beta = 1.0;  // length scale
  double period = 0.0;
  int q = 0;          // plane-wave winding number, 0 otherwise
};

// Unit-scale representative (alpha = beta = 1) of each elliptic family at
// modulus k in (0,1): period 2K for dn, 4K for cn and sn.
WaveParams canonical_params(WaveKind kind, double k);

// Constant solution sqrt(2m/T)/... i.e. amplitude fixed by mass m on P_T,
// with a = -2bm/T so the profile equation holds.
WaveParams constant_params(double b, double period, double mass);

// Plane wave (1/alpha) exp(i 2 pi q x / T) with mass m on P_T;
// a = (2 pi q / T)^2 - 2 b m / T.
WaveParams plane_wave_params(double b, double period, double mass, int q);

// L^2 mass (1/2) integral of |u|^2 over one period, in closed form.
double mass_of(const WaveParams& p);

// Inverts k -> mass_of at fixed (b, T) by bisection on k in
// [1e-9, 1-1e-9] to width 1e-12.  b must be positive for Dn/Cn, negative
// for Sn; the Dn family additionally requires m > pi^2/(bT) (below that
// only the constant branch exists), otherwise std::domain_error.
double modulus_from_mass(WaveKind kind, double b, double period, double mass);

// Full parameter set (alpha, beta, a) of the wave found by modulus_from_mass.
WaveParams params_from_mass(WaveKind kind, double b, double period, double mass);

// Modulus where K(k) = 2 E(k): boundary between dn-like and cn-like
// minimizers.  Bisection to 1e-12.
double critical_modulus();

struct SampleOptions {
  double shift = 0.0;  // translate the profile by this much in x
  double phase = 0.0;  // multiply by exp(i phase)
  bool sn_quarter_shift = false; // sample sn(K + x/beta): even representative
};

// Samples the wave on a grid whose period matches p.period (relative
// mismatch beyond 1e-9 throws).
grid::Field profile_samples(const WaveParams& p, const grid::Grid& g,
                            const SampleOptions& opts = {});

} // namespace pnls::waves
