#pragma once

#include <optional>
#include <vector>

#include "pnls/grid.hpp"
#include "pnls/waves.hpp"

// Linearization of the equation about a real standing wave u:
//   L+ = -D2(theta) - a - 3 b u^2,   L- = -D2(theta) - a - b u^2,
//   JL = [[0, L-], [-L+, 0]]
// with D2(theta) the Bloch-twisted second derivative, plus eigenvalue
// machinery: full-spectrum solves, the closed-form spectra of L+/- over a
// 4K period, the explicit preimages of cn and cn' under L+/-, stability
// verdicts with symmetry labels, and Bloch sweeps in theta.

namespace pnls::spectral {

using grid::cplx;

struct LinearizationSpec {
  grid::Field profile; // real samples of u (imaginary part <= 1e-12)
  double a = 0.0;
  double b = 0.0;
  double theta = 0.0;  // Bloch parameter in [0, 2 pi / T)
  int fd_order = 4;
};

enum class Which { Plus, Minus };

Eigen::MatrixXcd build_L(const LinearizationSpec& s, Which w);
Eigen::MatrixXcd build_JL(const LinearizationSpec& s);

// Dense spectrum, sorted by (Re, Im).  Routing: exactly-real matrices use
// the real QR path, Hermitian ones the self-adjoint path, anything else
// the complex QR path.  Iteration failure throws std::runtime_error.
std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m);

// Spectrum with eigenvectors (columns of V match the sorted values).
struct EigenSystem {
  std::vector<cplx> values;
  Eigen::MatrixXcd vectors;
};
EigenSystem eigensystem(const Eigen::MatrixXcd& m);

// Closed-form checks over P_4K at modulus k.  The sn tables are
//   L-: -1, -k^2, 0    L+: e-, 0, 3k^2, 3, e+   (e-+ = k^2+1 -+ 2 sqrt(k^4-k^2+1))
// and the cn / dn operators are unitary translates of the sn ones shifted
// by (+k^2, -3k^2) and (+1, -3) respectively.
struct TableCheck {
  std::vector<double> expected_minus, computed_minus;
  std::vector<double> expected_plus, computed_plus;
  double max_error = 0.0;
};
TableCheck lpm_table_check(waves::WaveKind kind, double k, int L, int fd_order);

// Explicit solutions of L+ phi1 = cn and L- xi1 = cn' over P_4K, built from
// the Jacobi epsilon function; residuals measured in the sup norm.
struct PreimageCheck {
  double residual_plus = 0.0;   // |L+ phi1 - cn|
  double residual_minus = 0.0;  // |L- xi1 - cn'|
  double orthogonality = 0.0;   // <phi1, cn'> (should vanish: opposite parity)
};
PreimageCheck lemma_preimage_check(double k, int L, int fd_order);

enum class SymmetryLabel {
  PeriodicEven,
  PeriodicOdd,
  AntiperiodicEven,
  AntiperiodicOdd,
  Periodic,
  Antiperiodic,
  Even,
  Odd,
  Mixed,
};
const char* to_string(SymmetryLabel s);

struct Cluster {
  cplx center;
  int multiplicity = 0;
  SymmetryLabel label = SymmetryLabel::Mixed;
  // Energy shares of the four symmetry subspaces (P+, P-, A+, A-).
  double share[4] = {0, 0, 0, 0};
};

struct StabilityReport {
  waves::WaveKind kind;
  double k = 0.0;
  int copies = 1;
  grid::Grid grid;
  double tol = 0.0;
  std::vector<cplx> eigenvalues;
  double max_real_part = 0.0;
  bool stable = false;
  std::vector<Cluster> clusters;
};

// JL spectrum of the canonical wave over n copies of its fundamental
// period.  tol defaults to max(1e-6, 10 dx^4) * ||JL||_inf; eigenvalues are
// clustered with relative radius 1e-4 max(1, |lambda|) and labeled by the
// dominant symmetry subspace of their eigenvectors (>= 99% share, else the
// coarser half-space labels, else Mixed).
StabilityReport stability_report(waves::WaveKind kind, double k, int copies,
                                 int L, int fd_order,
                                 std::optional<double> tol = std::nullopt);

struct BlochPoint {
  double theta = 0.0;
  std::vector<cplx> eigenvalues;
};

// JL(theta) spectra over the fundamental period of u^2 (2K for all three
// families), one solve per theta, distributed over worker threads
// (workers <= 0 picks the hardware count).  Results are ordered like the
// input thetas and do not depend on the scheduling.
std::vector<BlochPoint> bloch_sweep(waves::WaveKind kind, double k,
                                    const std::vector<double>& thetas, int L,
                                    int fd_order, int workers = 0);

} // namespace pnls::spectral
