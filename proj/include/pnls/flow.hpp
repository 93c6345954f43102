#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pnls/functionals.hpp"
#include "pnls/grid.hpp"

// Normalized gradient flow for the constrained minimization of the energy
// at fixed mass (and optionally fixed momentum / anti-periodicity).  One
// iteration is a semi-implicit backward-Euler solve followed by the
// constraint renormalizations:
//
//   solve (1/dt - D2 - b |u_n|^2) u~ = u_n / dt      (cyclic tridiagonal)
//   momentum renormalization (Fourier multiplier, when enforced)
//   anti-periodic projection (when enforced)
//   mass renormalization u_{n+1} = sqrt(m / M(u~)) u~
//
// The linear solve uses the order-2 stencil; its matrix is real, so real
// data stays exactly real.

namespace pnls::flow {

// Raised when a pivot of the cyclic tridiagonal factorization collapses.
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Constant off-diagonal cyclic tridiagonal solve (Thomas elimination plus a
// rank-one Sherman-Morrison correction for the wrap entries).  diag holds
// the main diagonal; every off-diagonal and both corner entries equal off.
std::vector<grid::cplx> solve_cyclic_tridiagonal(const std::vector<double>& diag,
                                                 double off,
                                                 const std::vector<grid::cplx>& rhs);

struct Watch {
  std::string name;
  grid::Field reference;
};

struct FlowConfig {
  double dt = 1.0;
  double b = 0.0;
  double mass = 1.0;
  double momentum = 0.0;
  bool enforce_momentum = false;
  bool enforce_antiperiodic = false;
  double tol = 1e-3;
  int max_iters = 500;
  // Stops on sup-norm modulus distance to this profile (after alignment)
  // when present; otherwise on the successive-iterate modulus delta.
  std::optional<grid::Field> reference;
  // Distances to these profiles are recorded every iteration (not used for
  // stopping).
  std::vector<Watch> watches;
  // Compute the momentum multiplier from the updated iterate instead of u_n.
  bool varpi_from_update = false;
};

enum class StopReason { SuccessiveTol, ReferenceTol, MaxIters, SolverFailure };

struct FlowResult {
  grid::Field final;
  int iterations = 0;
  bool converged = false;
  StopReason stop_reason = StopReason::MaxIters;
  // Entry n corresponds to iterate n; history has iterations+1 entries.
  std::vector<functionals::FunctionalReport> history;
  // deltas[n] = max_l | |u_n| - |u_{n-1}| |; deltas[0] is NaN.
  std::vector<double> deltas;
  // reference_distance[n] = aligned sup-norm modulus distance at iterate n
  // (empty when no reference is set).
  std::vector<double> reference_distance;
  // watch_distance[w][n], parallel to watches.
  std::vector<std::vector<double>> watch_distance;
};

grid::Field semi_implicit_step(const grid::Field& u, const FlowConfig& cfg);

// Fourier multiplier c_j -> c_j (1 - (2 pi / T) dt varpi j) with varpi
// chosen so the momentum of the result matches cfg.momentum to first
// order.  src supplies the linearization point (u_n, or the update itself
// when cfg.varpi_from_update is set).  A spectrally constant src admits no
// correction: identity if the target momentum is already met, otherwise
// std::domain_error.
grid::Field momentum_renormalize(const grid::Field& update, const grid::Field& src,
                                 const FlowConfig& cfg);

grid::Field mass_renormalize(const grid::Field& u, double mass);

struct Alignment {
  grid::Field aligned;
  int shift = 0;      // aligned_l = exp(i phase) * field_{l - shift}
  double phase = 0.0;
  double residual = 0.0; // L^2 distance of aligned to ref
};

// Best translation (exhaustive over node shifts) and phase (closed form)
// matching field to ref; used for distances modulo the gauge group.
Alignment align(const grid::Field& field, const grid::Field& ref);

FlowResult run_flow(const grid::Field& u0, const FlowConfig& cfg);

} // namespace pnls::flow
