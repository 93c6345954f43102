#pragma once

#include "pnls/grid.hpp"

// Discrete invariants of the flow: mass, momentum, energy, and the energy
// gradient.  Mass and the quartic term are rectangle-rule sums; momentum
// and the kinetic term are evaluated through the Fourier coefficients.

namespace pnls::functionals {

// (dx/2) sum |u_l|^2
double mass(const grid::Field& u);

// -pi sum_j j |c_j|^2
double momentum(const grid::Field& u);

// (2 pi^2 / T) sum_j j^2 |c_j|^2 - (b/4) dx sum_l |u_l|^4
double energy(const grid::Field& u, double b);

// Same quartic term, but the kinetic part is the finite-difference
// quadratic form -(dx/2) Re<D2 u, u> at the given stencil order.  This is
// the exact antiderivative of energy_gradient; the Fourier form differs
// from it at O(dx^order).
double energy_fd(const grid::Field& u, double b, int order = 2);

// -D2 u - b |u|^2 u with the order-2 stencil: the gradient the flow
// discretizes.
grid::Field energy_gradient(const grid::Field& u, double b, int order = 2);

struct FunctionalReport {
  double mass = 0.0;
  double momentum = 0.0;
  double energy = 0.0;
  double action(double a) const { return energy - a * mass; }
};

// All three invariants from a single transform.
FunctionalReport report(const grid::Field& u, double b);

} // namespace pnls::functionals
