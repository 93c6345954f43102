#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

// Uniform periodic grids, the discrete Fourier transform in the
// normalization used throughout (coefficients of exp(i 2 pi j x / T) with
// x measured from -T/2), circulant finite-difference matrices, and the
// symmetry projections of the period lattice.

namespace pnls::grid {

using cplx = std::complex<double>;

// x_l = -T/2 + l dx, l = 0..L-1, dx = T/L.  L must be even and positive so
// half-period translation is an exact index shift.
struct Grid {
  int size = 0;
  double period = 0.0;

  Grid() = default;
  Grid(int L, double T);

  double dx() const { return period / size; }
  double node(int l) const { return -0.5 * period + l * dx(); }
  bool operator==(const Grid&) const = default;
};

struct Field {
  Grid grid;
  std::vector<cplx> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(g.size) {}
};

// c_j for j = -L/2 .. L/2-1, stored at index j + L/2.
// c_j = (1/L) sum_l u_l exp(-i 2 pi j x_l / T); the node offset makes a
// (-1)^j twist relative to the index-based transform.
struct FourierCoeffs {
  Grid grid;
  std::vector<cplx> c;

  int lowest() const { return -grid.size / 2; }
  int highest() const { return grid.size / 2 - 1; }
  // Weight of mode j in first-derivative quadratic forms.  The lowest mode
  // -L/2 has no +L/2 partner, so its weight is zero; with that convention
  // real fields carry exactly zero discrete momentum.
  double odd_weight(int j) const {
    return j == lowest() ? 0.0 : static_cast<double>(j);
  }
  cplx& at(int j) { return c[static_cast<size_t>(j + grid.size / 2)]; }
  const cplx& at(int j) const { return c[static_cast<size_t>(j + grid.size / 2)]; }
};

FourierCoeffs dft(const Field& f);
Field idft(const FourierCoeffs& fc);

// Dense circulant matrix for (d/dx + i theta)^degree.
//   degree 1: order 2 [-1 0 1]/(2dx), order 4 [1 -8 0 8 -1]/(12dx)
//   degree 2: order 2 [1 -2 1]/dx^2,  order 4 [-1 16 -30 16 -1]/(12dx^2)
// degree 2 with theta != 0 is D2 + 2 i theta D1 - theta^2 I, so the result
// is Hermitian (degree 2) or anti-Hermitian (degree 1) by construction.
struct DerivativeMatrix {
  Grid grid;
  int degree = 2;
  int order = 2;
  double theta = 0.0;
  Eigen::MatrixXcd dense;
};

DerivativeMatrix derivative_matrix(const Grid& g, int degree, int order,
                                   double theta = 0.0);

// (f - translate by T/2)/2: annihilates every even Fourier coefficient,
// leaves odd ones fixed.
Field project_antiperiodic(const Field& f);

enum class Symmetry { PeriodicHalf, AntiperiodicHalf, Even, Odd };

// Averages f with its half-period translate (+/-) or its reflection
// through x = 0 (+/-).  Each projection is idempotent; the half-period pair
// sums to the identity, as does the even/odd pair.
Field project_symmetry(const Field& f, Symmetry s);

} // namespace pnls::grid
