#include "pnls/grid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace pnls::grid {
namespace {

using std::numbers::pi;

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place length-L Fourier sum a_r = sum_l a_l exp(dir i 2 pi r l / L),
// dir = -1 forward, +1 inverse; no normalization.  Radix-2 when L is a
// power of two, direct summation otherwise (grids are small in that case).
void fourier_sum(std::vector<cplx>& a, int dir) {
  const int L = static_cast<int>(a.size());
  if (is_pow2(L)) {
    for (int i = 1, j = 0; i < L; ++i) {
      int bit = L >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    for (int len = 2; len <= L; len <<= 1) {
      const double ang = dir * 2.0 * pi / len;
      for (int i = 0; i < L; i += len) {
        for (int j = 0; j < len / 2; ++j) {
          const cplx w = std::polar(1.0, ang * j);
          const cplx u = a[i + j];
          const cplx v = a[i + j + len / 2] * w;
          a[i + j] = u + v;
          a[i + j + len / 2] = u - v;
        }
      }
    }
  } else {
    std::vector<cplx> out(L);
    for (int r = 0; r < L; ++r) {
      cplx acc = 0.0;
      for (int l = 0; l < L; ++l) {
        acc += a[l] * std::polar(1.0, dir * 2.0 * pi * static_cast<double>(r) *
                                          static_cast<double>(l) / L);
      }
      out[r] = acc;
    }
    a = std::move(out);
  }
}

void check_field(const Field& f, const char* who) {
  if (f.grid.size < 2 || f.values.size() != static_cast<size_t>(f.grid.size)) {
    throw std::invalid_argument(std::string(who) + ": field size does not match its grid");
  }
}

} // namespace

Grid::Grid(int L, double T) : size(L), period(T) {
  if (L < 2 || L % 2 != 0) {
    throw std::domain_error("Grid: size must be a positive even number");
  }
  if (!(T > 0.0) || !std::isfinite(T)) {
    throw std::domain_error("Grid: period must be positive and finite");
  }
}

FourierCoeffs dft(const Field& f) {
  check_field(f, "dft");
  const int L = f.grid.size;
  std::vector<cplx> a = f.values;
  fourier_sum(a, -1);
  FourierCoeffs out;
  out.grid = f.grid;
  out.c.assign(L, cplx(0.0));
  for (int j = out.lowest(); j <= out.highest(); ++j) {
    const int r = ((j % L) + L) % L;
    // exp(-i 2 pi j x_l / T) = (-1)^j exp(-i 2 pi j l / L) on our nodes
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    out.at(j) = a[r] * (sign / L);
  }
  return out;
}

Field idft(const FourierCoeffs& fc) {
  const int L = fc.grid.size;
  if (L < 2 || fc.c.size() != static_cast<size_t>(L)) {
    throw std::invalid_argument("idft: coefficient size does not match the grid");
  }
  std::vector<cplx> a(L, cplx(0.0));
  for (int j = fc.lowest(); j <= fc.highest(); ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    a[((j % L) + L) % L] = fc.at(j) * sign;
  }
  fourier_sum(a, +1);
  Field out(fc.grid);
  out.values = std::move(a);
  return out;
}

DerivativeMatrix derivative_matrix(const Grid& g, int degree, int order,
                                   double theta) {
  if (degree != 1 && degree != 2) {
    throw std::domain_error("derivative_matrix: degree must be 1 or 2");
  }
  if (order != 2 && order != 4) {
    throw std::domain_error("derivative_matrix: order must be 2 or 4");
  }
  if (!std::isfinite(theta)) {
    throw std::domain_error("derivative_matrix: theta must be finite");
  }
  const int L = g.size;
  if (L < 2) throw std::domain_error("derivative_matrix: grid is empty");
  const double dx = g.dx();

  auto circulant = [L](std::initializer_list<std::pair<int, double>> stencil) {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(L, L);
    for (auto [off, val] : stencil) {
      for (int l = 0; l < L; ++l) {
        M(l, ((l + off) % L + L) % L) += val;
      }
    }
    return M;
  };

  Eigen::MatrixXd D1, D2;
  if (order == 2) {
    D1 = circulant({{-1, -1.0 / (2 * dx)}, {1, 1.0 / (2 * dx)}});
    D2 = circulant({{-1, 1.0 / (dx * dx)}, {0, -2.0 / (dx * dx)}, {1, 1.0 / (dx * dx)}});
  } else {
    const double s1 = 12 * dx, s2 = 12 * dx * dx;
    D1 = circulant({{-2, 1.0 / s1}, {-1, -8.0 / s1}, {1, 8.0 / s1}, {2, -1.0 / s1}});
    D2 = circulant({{-2, -1.0 / s2}, {-1, 16.0 / s2}, {0, -30.0 / s2},
                    {1, 16.0 / s2}, {2, -1.0 / s2}});
  }

  DerivativeMatrix out;
  out.grid = g;
  out.degree = degree;
  out.order = order;
  out.theta = theta;
  const cplx iu(0.0, 1.0);
  if (degree == 1) {
    out.dense = D1.cast<cplx>();
    out.dense.diagonal().array() += iu * theta;
  } else {
    out.dense = D2.cast<cplx>() + (2.0 * iu * theta) * D1.cast<cplx>();
    out.dense.diagonal().array() -= theta * theta;
  }
  return out;
}

Field project_antiperiodic(const Field& f) {
  check_field(f, "project_antiperiodic");
  const int L = f.grid.size;
  Field out(f.grid);
  for (int l = 0; l < L; ++l) {
    out.values[l] = 0.5 * (f.values[l] - f.values[(l + L / 2) % L]);
  }
  return out;
}

Field project_symmetry(const Field& f, Symmetry s) {
  check_field(f, "project_symmetry");
  const int L = f.grid.size;
  Field out(f.grid);
  for (int l = 0; l < L; ++l) {
    cplx other;
    double sign;
    switch (s) {
      case Symmetry::PeriodicHalf:
        other = f.values[(l + L / 2) % L];
        sign = 1.0;
        break;
      case Symmetry::AntiperiodicHalf:
        other = f.values[(l + L / 2) % L];
        sign = -1.0;
        break;
      case Symmetry::Even:
        other = f.values[(L - l) % L];
        sign = 1.0;
        break;
      default: // Odd
        other = f.values[(L - l) % L];
        sign = -1.0;
        break;
    }
    out.values[l] = 0.5 * (f.values[l] + sign * other);
  }
  return out;
}

} // namespace pnls::grid
