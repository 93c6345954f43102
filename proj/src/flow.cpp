#include "pnls/flow.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace pnls::flow {
namespace {

using grid::cplx;
using grid::Field;
using std::numbers::pi;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Thomas elimination for the (non-cyclic) tridiagonal core; templated so
// the Sherman-Morrison correction solve can stay purely real.
template <typename T>
std::vector<T> thomas(const std::vector<double>& d, double off,
                      const std::vector<T>& r, double tiny) {
  const int n = static_cast<int>(d.size());
  std::vector<double> piv(n);
  std::vector<T> x(n);
  piv[0] = d[0];
  if (std::abs(piv[0]) < tiny) {
    throw solver_error("cyclic tridiagonal solve: pivot collapsed");
  }
  x[0] = r[0];
  for (int i = 1; i < n; ++i) {
    const double m = off / piv[i - 1];
    piv[i] = d[i] - m * off;
    if (std::abs(piv[i]) < tiny) {
      throw solver_error("cyclic tridiagonal solve: pivot collapsed");
    }
    x[i] = r[i] - m * x[i - 1];
  }
  x[n - 1] = x[n - 1] / piv[n - 1];
  for (int i = n - 2; i >= 0; --i) {
    x[i] = (x[i] - off * x[i + 1]) / piv[i];
  }
  return x;
}

// Sup-norm distance of moduli minimized over all node translations; the
// measure the stopping rules use (phase drops out of the modulus, so only
// the translation needs aligning, and the best shift is found exactly).
double modulus_distance(const Field& f, const Field& ref) {
  const int L = f.grid.size;
  double best = std::numeric_limits<double>::infinity();
  for (int s = 0; s < L; ++s) {
    double d = 0.0;
    for (int l = 0; l < L; ++l) {
      d = std::max(d, std::abs(std::abs(f.values[(l + s) % L]) -
                               std::abs(ref.values[l])));
      if (d >= best) break;
    }
    best = std::min(best, d);
  }
  return best;
}

void validate_config(const Field& u0, const FlowConfig& cfg) {
  require(cfg.dt > 0.0, "run_flow: dt must be positive");
  require(cfg.mass > 0.0, "run_flow: target mass must be positive");
  require(cfg.tol >= 0.0, "run_flow: tolerance must be nonnegative");
  require(cfg.max_iters >= 1, "run_flow: max_iters must be at least 1");
  require(u0.grid.size >= 4, "run_flow: grid too small");
  if (cfg.reference) {
    require(cfg.reference->grid == u0.grid, "run_flow: reference grid mismatch");
  }
  for (const auto& w : cfg.watches) {
    require(w.reference.grid == u0.grid, "run_flow: watch grid mismatch");
  }
}

} // namespace

std::vector<cplx> solve_cyclic_tridiagonal(const std::vector<double>& diag,
                                           double off,
                                           const std::vector<cplx>& rhs) {
  const int n = static_cast<int>(diag.size());
  if (n < 3 || rhs.size() != diag.size()) {
    throw std::invalid_argument("solve_cyclic_tridiagonal: need n >= 3 and matching sizes");
  }
  double scale = 2.0 * std::abs(off);
  for (double d : diag) scale = std::max(scale, std::abs(d));
  const double tiny = 1e-14 * std::max(1.0, scale);

  // A = B + u v^T with u = (gamma, 0, ..., off)^T, v = (1, 0, ..., off/gamma)^T
  // and B the plain tridiagonal matrix with the first and last diagonal
  // entries adjusted; gamma = -diag[0] keeps B well conditioned.
  const double gamma = -diag[0];
  if (std::abs(gamma) < tiny) {
    throw solver_error("cyclic tridiagonal solve: corner pivot collapsed");
  }
  std::vector<double> d = diag;
  d[0] = diag[0] - gamma;
  d[n - 1] = diag[n - 1] - off * off / gamma;

  const auto y = thomas<cplx>(d, off, rhs, tiny);
  std::vector<double> corner(n, 0.0);
  corner[0] = gamma;
  corner[n - 1] = off;
  const auto z = thomas<double>(d, off, corner, tiny);

  const cplx vy = y[0] + (off / gamma) * y[n - 1];
  const double vz = z[0] + (off / gamma) * z[n - 1];
  if (std::abs(1.0 + vz) < 1e-14) {
    throw solver_error("cyclic tridiagonal solve: rank-one correction degenerate");
  }
  const cplx factor = vy / (1.0 + vz);
  std::vector<cplx> x(n);
  for (int i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
  return x;
}

Field semi_implicit_step(const Field& u, const FlowConfig& cfg) {
  require(cfg.dt > 0.0, "semi_implicit_step: dt must be positive");
  const int L = u.grid.size;
  const double dx = u.grid.dx();
  const double off = -1.0 / (dx * dx);
  std::vector<double> diag(L);
  std::vector<cplx> rhs(L);
  for (int l = 0; l < L; ++l) {
    diag[l] = 1.0 / cfg.dt + 2.0 / (dx * dx) - cfg.b * std::norm(u.values[l]);
    rhs[l] = u.values[l] / cfg.dt;
  }
  Field out(u.grid);
  out.values = solve_cyclic_tridiagonal(diag, off, rhs);
  return out;
}

Field momentum_renormalize(const Field& update, const Field& src,
                           const FlowConfig& cfg) {
  require(update.grid == src.grid, "momentum_renormalize: grid mismatch");
  const double T = src.grid.period;
  const auto cs = grid::dft(src);
  double sum2 = 0.0, jsum = 0.0, j2sum = 0.0;
  for (int j = cs.lowest(); j <= cs.highest(); ++j) {
    const double n = std::norm(cs.at(j));
    const double w = cs.odd_weight(j);
    sum2 += n;
    jsum += w * n;
    j2sum += w * w * n;
  }
  // |du/dx|^2 in L2; vanishing means src is spectrally constant and the
  // multiplier has no momentum handle at all.
  if (j2sum <= 1e-24 * sum2) {
    const double p_now = -pi * jsum;
    if (std::abs(cfg.momentum - p_now) <= 1e-12 * std::max(1.0, std::abs(cfg.momentum))) {
      return update;
    }
    throw std::domain_error(
        "momentum_renormalize: constant state cannot reach the target momentum");
  }
  const double grad2 = (4.0 * pi * pi / T) * j2sum;
  const double p_now = -pi * jsum;
  const double varpi = (cfg.momentum - p_now) / (cfg.dt * grad2);
  // Largest deviation of the multiplier from 1 over all modes.  Below one
  // ulp the renormalization is numerically the identity; skipping the
  // transform also keeps real iterates exactly real.
  const double max_dev = std::abs((2.0 * pi / T) * cfg.dt * varpi) *
                         (0.5 * src.grid.size);
  if (max_dev < std::numeric_limits<double>::epsilon()) return update;

  auto cu = grid::dft(update);
  for (int j = cu.lowest(); j <= cu.highest(); ++j) {
    cu.at(j) *= (1.0 - (2.0 * pi / T) * cfg.dt * varpi * cu.odd_weight(j));
  }
  return grid::idft(cu);
}

Field mass_renormalize(const Field& u, double mass) {
  require(mass > 0.0, "mass_renormalize: target mass must be positive");
  const double current = functionals::mass(u);
  require(current > 0.0, "mass_renormalize: iterate has zero mass");
  const double s = std::sqrt(mass / current);
  Field out = u;
  for (auto& v : out.values) v *= s;
  return out;
}

Alignment align(const Field& field, const Field& ref) {
  require(field.grid == ref.grid, "align: grid mismatch");
  const int L = field.grid.size;
  const double dx = field.grid.dx();

  int best_s = 0;
  cplx best_ip = 0.0;
  for (int s = -L / 2; s < L / 2; ++s) {
    cplx ip = 0.0;
    for (int l = 0; l < L; ++l) {
      ip += field.values[((l - s) % L + L) % L] * std::conj(ref.values[l]);
    }
    if (std::abs(ip) > std::abs(best_ip)) {
      best_ip = ip;
      best_s = s;
    }
  }

  Alignment out;
  out.shift = best_s;
  out.phase = (std::abs(best_ip) == 0.0) ? 0.0 : -std::arg(best_ip);
  out.aligned = Field(field.grid);
  const cplx rot = std::polar(1.0, out.phase);
  double res2 = 0.0;
  for (int l = 0; l < L; ++l) {
    out.aligned.values[l] = rot * field.values[((l - best_s) % L + L) % L];
    res2 += std::norm(out.aligned.values[l] - ref.values[l]);
  }
  out.residual = std::sqrt(dx * res2);
  return out;
}

FlowResult run_flow(const Field& u0, const FlowConfig& cfg) {
  validate_config(u0, cfg);
  FlowResult r;
  Field u = u0;

  r.history.push_back(functionals::report(u, cfg.b));
  r.deltas.push_back(std::numeric_limits<double>::quiet_NaN());
  if (cfg.reference) {
    r.reference_distance.push_back(modulus_distance(u, *cfg.reference));
  }
  r.watch_distance.resize(cfg.watches.size());
  for (size_t w = 0; w < cfg.watches.size(); ++w) {
    r.watch_distance[w].push_back(modulus_distance(u, cfg.watches[w].reference));
  }

  for (int iter = 1; iter <= cfg.max_iters; ++iter) {
    const Field un = u;
    Field ut;
    try {
      ut = semi_implicit_step(un, cfg);
    } catch (const solver_error&) {
      r.converged = false;
      r.stop_reason = StopReason::SolverFailure;
      break;
    }
    if (cfg.enforce_momentum) {
      ut = momentum_renormalize(ut, cfg.varpi_from_update ? ut : un, cfg);
    }
    if (cfg.enforce_antiperiodic) {
      ut = grid::project_antiperiodic(ut);
    }
    u = mass_renormalize(ut, cfg.mass);

    r.iterations = iter;
    r.history.push_back(functionals::report(u, cfg.b));
    double delta = 0.0;
    for (int l = 0; l < u.grid.size; ++l) {
      delta = std::max(delta, std::abs(std::abs(u.values[l]) - std::abs(un.values[l])));
    }
    r.deltas.push_back(delta);
    for (size_t w = 0; w < cfg.watches.size(); ++w) {
      r.watch_distance[w].push_back(modulus_distance(u, cfg.watches[w].reference));
    }

    if (cfg.reference) {
      const double d = modulus_distance(u, *cfg.reference);
      r.reference_distance.push_back(d);
      if (d < cfg.tol) {
        r.converged = true;
        r.stop_reason = StopReason::ReferenceTol;
        break;
      }
    } else if (delta < cfg.tol) {
      r.converged = true;
      r.stop_reason = StopReason::SuccessiveTol;
      break;
    }
  }

  r.final = u;
  return r;
}

} // namespace pnls::flow
