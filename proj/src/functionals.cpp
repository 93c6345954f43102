#include "pnls/functionals.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pnls::functionals {
namespace {

using grid::cplx;
using grid::Field;
using std::numbers::pi;

// Periodic second-difference application; the same stencils as
// derivative_matrix at theta = 0, without forming the matrix.
std::vector<cplx> apply_d2(const Field& u, int order) {
  if (order != 2 && order != 4) {
    throw std::domain_error("apply_d2: order must be 2 or 4");
  }
  const int L = u.grid.size;
  const double dx = u.grid.dx();
  std::vector<cplx> out(L);
  auto at = [&](int l) { return u.values[((l % L) + L) % L]; };
  if (order == 2) {
    const double s = 1.0 / (dx * dx);
    for (int l = 0; l < L; ++l) {
      out[l] = s * (at(l - 1) - 2.0 * at(l) + at(l + 1));
    }
  } else {
    const double s = 1.0 / (12.0 * dx * dx);
    for (int l = 0; l < L; ++l) {
      out[l] = s * (-at(l - 2) + 16.0 * at(l - 1) - 30.0 * at(l) +
                    16.0 * at(l + 1) - at(l + 2));
    }
  }
  return out;
}

double quartic_term(const Field& u, double b) {
  double s = 0.0;
  for (const auto& v : u.values) {
    const double n = std::norm(v);
    s += n * n;
  }
  return 0.25 * b * u.grid.dx() * s;
}

} // namespace

double mass(const Field& u) {
  double s = 0.0;
  for (const auto& v : u.values) s += std::norm(v);
  return 0.5 * u.grid.dx() * s;
}

double momentum(const Field& u) {
  const auto c = grid::dft(u);
  double s = 0.0;
  for (int j = c.lowest(); j <= c.highest(); ++j) {
    s += c.odd_weight(j) * std::norm(c.at(j));
  }
  return -pi * s;
}

double energy(const Field& u, double b) {
  const auto c = grid::dft(u);
  double kin = 0.0;
  for (int j = c.lowest(); j <= c.highest(); ++j) {
    kin += static_cast<double>(j) * j * std::norm(c.at(j));
  }
  kin *= 2.0 * pi * pi / u.grid.period;
  return kin - quartic_term(u, b);
}

double energy_fd(const Field& u, double b, int order) {
  const auto d2u = apply_d2(u, order);
  double kin = 0.0;
  for (int l = 0; l < u.grid.size; ++l) {
    kin += (std::conj(u.values[l]) * d2u[l]).real();
  }
  kin *= -0.5 * u.grid.dx();
  return kin - quartic_term(u, b);
}

Field energy_gradient(const Field& u, double b, int order) {
  const auto d2u = apply_d2(u, order);
  Field g(u.grid);
  for (int l = 0; l < u.grid.size; ++l) {
    g.values[l] = -d2u[l] - b * std::norm(u.values[l]) * u.values[l];
  }
  return g;
}

FunctionalReport report(const Field& u, double b) {
  const auto c = grid::dft(u);
  double p = 0.0, kin = 0.0;
  for (int j = c.lowest(); j <= c.highest(); ++j) {
    const double n = std::norm(c.at(j));
    p += c.odd_weight(j) * n;
    kin += static_cast<double>(j) * j * n;
  }
  FunctionalReport r;
  r.mass = mass(u);
  r.momentum = -pi * p;
  r.energy = (2.0 * pi * pi / u.grid.period) * kin - quartic_term(u, b);
  return r;
}

} // namespace pnls::functionals
