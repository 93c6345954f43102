#include "pnls/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "pnls/elliptic.hpp"

namespace pnls::spectral {
namespace {

using elliptic::EllipticModulus;
using grid::Field;
using std::numbers::pi;

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

bool is_elliptic(waves::WaveKind kind) {
  return kind == waves::WaveKind::Dn || kind == waves::WaveKind::Cn ||
         kind == waves::WaveKind::Sn;
}

// Canonical profile samples on an arbitrary grid (the grid period need not
// match the wave's fundamental period: Bloch sweeps use the period of u^2,
// stability runs use n fundamental periods).
Field sample_profile(waves::WaveKind kind, double k, const grid::Grid& g) {
  Field u(g);
  for (int l = 0; l < g.size; ++l) {
    const auto j = elliptic::jacobi(g.node(l), k);
    double v = 0.0;
    switch (kind) {
      case waves::WaveKind::Dn: v = j.dn; break;
      case waves::WaveKind::Cn: v = j.cn; break;
      default: v = j.sn; break;
    }
    u.values[l] = v;
  }
  return u;
}

double max_imag(const Eigen::MatrixXcd& m) {
  return m.imag().cwiseAbs().maxCoeff();
}

bool nearly_hermitian(const Eigen::MatrixXcd& m) {
  const double scale = 1.0 + m.cwiseAbs().maxCoeff();
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

std::vector<int> sort_permutation(const std::vector<cplx>& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) {
    if (v[a].real() != v[b].real()) return v[a].real() < v[b].real();
    return v[a].imag() < v[b].imag();
  });
  return idx;
}

struct RawEigen {
  std::vector<cplx> values;
  Eigen::MatrixXcd vectors; // empty when not requested
};

RawEigen solve_dense(const Eigen::MatrixXcd& m, bool with_vectors) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("eigenvalues: matrix must be square and nonempty");
  }
  const int n = static_cast<int>(m.rows());
  RawEigen out;
  out.values.resize(n);
  if (nearly_hermitian(m)) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(
        m, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("eigenvalues: self-adjoint iteration failed");
    }
    for (int i = 0; i < n; ++i) out.values[i] = es.eigenvalues()(i);
    if (with_vectors) out.vectors = es.eigenvectors();
  } else if (max_imag(m) == 0.0) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(m.real(), with_vectors);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("eigenvalues: real QR iteration failed");
    }
    for (int i = 0; i < n; ++i) out.values[i] = es.eigenvalues()(i);
    if (with_vectors) out.vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m, with_vectors);
    if (es.info() != Eigen::Success) {
      throw std::runtime_error("eigenvalues: complex QR iteration failed");
    }
    for (int i = 0; i < n; ++i) out.values[i] = es.eigenvalues()(i);
    if (with_vectors) out.vectors = es.eigenvectors();
  }
  const auto perm = sort_permutation(out.values);
  RawEigen sorted;
  sorted.values.resize(n);
  if (with_vectors) sorted.vectors.resize(m.rows(), m.cols());
  for (int i = 0; i < n; ++i) {
    sorted.values[i] = out.values[perm[i]];
    if (with_vectors) sorted.vectors.col(i) = out.vectors.col(perm[i]);
  }
  return sorted;
}

// sn-wave reference spectra over P_4K plus the translation shifts that
// carry them to the cn and dn operators.
void table_spectra(waves::WaveKind kind, double k, std::vector<double>& minus,
                   std::vector<double>& plus) {
  const double m = k * k;
  const double root = std::sqrt(m * m - m + 1.0);
  minus = {-1.0, -m, 0.0};
  plus = {m + 1.0 - 2.0 * root, 0.0, 3.0 * m, 3.0, m + 1.0 + 2.0 * root};
  double shift_minus = 0.0, shift_plus = 0.0;
  if (kind == waves::WaveKind::Cn) {
    shift_minus = m;
    shift_plus = -3.0 * m;
  } else if (kind == waves::WaveKind::Dn) {
    shift_minus = 1.0;
    shift_plus = -3.0;
  }
  for (auto& v : minus) v += shift_minus;
  for (auto& v : plus) v += shift_plus;
  std::sort(minus.begin(), minus.end());
  std::sort(plus.begin(), plus.end());
}

} // namespace

const char* to_string(SymmetryLabel s) {
  switch (s) {
    case SymmetryLabel::PeriodicEven: return "periodic-even";
    case SymmetryLabel::PeriodicOdd: return "periodic-odd";
    case SymmetryLabel::AntiperiodicEven: return "antiperiodic-even";
    case SymmetryLabel::AntiperiodicOdd: return "antiperiodic-odd";
    case SymmetryLabel::Periodic: return "periodic";
    case SymmetryLabel::Antiperiodic: return "antiperiodic";
    case SymmetryLabel::Even: return "even";
    case SymmetryLabel::Odd: return "odd";
    default: return "mixed";
  }
}

Eigen::MatrixXcd build_L(const LinearizationSpec& s, Which w) {
  const auto& g = s.profile.grid;
  require(g.size >= 4, "build_L: grid too small");
  require(s.profile.values.size() == static_cast<size_t>(g.size),
          "build_L: profile does not match its grid");
  require(s.fd_order == 2 || s.fd_order == 4, "build_L: order must be 2 or 4");
  require(s.theta >= 0.0 && s.theta < 2.0 * pi / g.period,
          "build_L: theta must lie in [0, 2 pi / T)");
  double imag = 0.0;
  for (const auto& v : s.profile.values) imag = std::max(imag, std::abs(v.imag()));
  require(imag <= 1e-12, "build_L: profile must be real");

  Eigen::MatrixXcd M = -grid::derivative_matrix(g, 2, s.fd_order, s.theta).dense;
  const double coef = (w == Which::Plus) ? 3.0 : 1.0;
  for (int l = 0; l < g.size; ++l) {
    const double u = s.profile.values[l].real();
    M(l, l) -= s.a + coef * s.b * u * u;
  }
  return M;
}

Eigen::MatrixXcd build_JL(const LinearizationSpec& s) {
  const int L = s.profile.grid.size;
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(2 * L, 2 * L);
  M.topRightCorner(L, L) = build_L(s, Which::Minus);
  M.bottomLeftCorner(L, L) = -build_L(s, Which::Plus);
  return M;
}

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& m) {
  return solve_dense(m, false).values;
}

EigenSystem eigensystem(const Eigen::MatrixXcd& m) {
  auto raw = solve_dense(m, true);
  return {std::move(raw.values), std::move(raw.vectors)};
}

TableCheck lpm_table_check(waves::WaveKind kind, double k, int L, int fd_order) {
  require(is_elliptic(kind), "lpm_table_check: elliptic families only");
  const auto params = waves::canonical_params(kind, k);
  const EllipticModulus em(k);
  const grid::Grid g(L, 4.0 * em.K);
  LinearizationSpec spec{sample_profile(kind, k, g), params.a, params.b, 0.0,
                         fd_order};

  TableCheck out;
  table_spectra(kind, k, out.expected_minus, out.expected_plus);
  const auto evm = eigenvalues(build_L(spec, Which::Minus));
  const auto evp = eigenvalues(build_L(spec, Which::Plus));
  for (size_t i = 0; i < out.expected_minus.size(); ++i) {
    out.computed_minus.push_back(evm[i].real());
  }
  for (size_t i = 0; i < out.expected_plus.size(); ++i) {
    out.computed_plus.push_back(evp[i].real());
  }
  for (size_t i = 0; i < out.expected_minus.size(); ++i) {
    out.max_error = std::max(out.max_error,
                             std::abs(out.computed_minus[i] - out.expected_minus[i]));
  }
  for (size_t i = 0; i < out.expected_plus.size(); ++i) {
    out.max_error = std::max(out.max_error,
                             std::abs(out.computed_plus[i] - out.expected_plus[i]));
  }
  return out;
}

PreimageCheck lemma_preimage_check(double k, int L, int fd_order) {
  require(k > 0.0 && k < 1.0, "lemma_preimage_check: modulus must lie in (0,1)");
  const EllipticModulus em(k);
  const double K = em.K, E = em.E, m = k * k;
  const grid::Grid g(L, 4.0 * K);

  Field cn(g), cnx(g), phi1(g), xi1(g);
  // phi1 solves L+ phi1 = cn, xi1 solves L- xi1 = cn'; both are built from
  // the quasi-periodic primitive of dn^2, so they are genuinely 4K-periodic.
  const double dplus = 2.0 * (2.0 * m - 1.0) * E / K + 2.0 * (1.0 - m);
  const double dminus = 2.0 * E / K - 2.0 * (1.0 - m);
  for (int l = 0; l < L; ++l) {
    const double x = g.node(l);
    const auto j = elliptic::jacobi(x, k);
    const double eps = elliptic::jacobi_epsilon(x, k);
    const double c = j.cn;
    const double cx = -j.sn * j.dn;
    const double lin = eps - (E / K) * x;
    cn.values[l] = c;
    cnx.values[l] = cx;
    phi1.values[l] =
        (lin * cx - m * c * c * c + ((K * m - E) / K) * c) / dplus;
    xi1.values[l] = (lin * c + cx) / dminus;
  }

  const auto params = waves::canonical_params(waves::WaveKind::Cn, k);
  LinearizationSpec spec{cn, params.a, params.b, 0.0, fd_order};
  const auto Lp = build_L(spec, Which::Plus);
  const auto Lm = build_L(spec, Which::Minus);

  Eigen::VectorXcd vphi1(L), vxi1(L), vcn(L), vcnx(L);
  for (int l = 0; l < L; ++l) {
    vphi1(l) = phi1.values[l];
    vxi1(l) = xi1.values[l];
    vcn(l) = cn.values[l];
    vcnx(l) = cnx.values[l];
  }
  const double dx = g.dx();
  PreimageCheck out;
  out.residual_plus = (Lp * vphi1 - vcn).cwiseAbs().maxCoeff();
  out.residual_minus = (Lm * vxi1 - vcnx).cwiseAbs().maxCoeff();
  out.orthogonality = std::abs(dx * (vcnx.adjoint() * vphi1)(0, 0).real());
  return out;
}

StabilityReport stability_report(waves::WaveKind kind, double k, int copies,
                                 int L, int fd_order,
                                 std::optional<double> tol) {
  require(is_elliptic(kind), "stability_report: elliptic families only");
  require(copies >= 1, "stability_report: copies must be >= 1");
  const auto params = waves::canonical_params(kind, k);
  const grid::Grid g(L, copies * params.period);
  LinearizationSpec spec{sample_profile(kind, k, g), params.a, params.b, 0.0,
                         fd_order};
  const auto JL = build_JL(spec);
  const auto sys = eigensystem(JL);

  StabilityReport rep;
  rep.kind = kind;
  rep.k = k;
  rep.copies = copies;
  rep.grid = g;
  rep.eigenvalues = sys.values;

  const double norm_inf = JL.cwiseAbs().rowwise().sum().maxCoeff();
  const double dx = g.dx();
  rep.tol = tol.value_or(std::max(1e-6, 10.0 * dx * dx * dx * dx) * norm_inf);
  rep.max_real_part = 0.0;
  for (const auto& ev : sys.values) {
    rep.max_real_part = std::max(rep.max_real_part, std::abs(ev.real()));
  }
  rep.stable = rep.max_real_part <= rep.tol;

  // Cluster numerically split copies of the same eigenvalue: union-find
  // with a radius relative to the eigenvalue's own size.
  const int n = static_cast<int>(sys.values.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  };
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double radius =
          1e-4 * std::max({1.0, std::abs(sys.values[i]), std::abs(sys.values[j])});
      if (std::abs(sys.values[i] - sys.values[j]) <= radius) {
        parent[find(i)] = find(j);
      }
    }
  }

  std::vector<std::vector<int>> members_of(n);
  for (int i = 0; i < n; ++i) members_of[find(i)].push_back(i);

  const int Lhalf = g.size;
  auto subspace_energy = [&](const Eigen::VectorXcd& vec, grid::Symmetry half,
                             grid::Symmetry parity) {
    double e = 0.0;
    for (int block = 0; block < 2; ++block) {
      Field f(g);
      for (int l = 0; l < Lhalf; ++l) f.values[l] = vec(block * Lhalf + l);
      const Field p = grid::project_symmetry(grid::project_symmetry(f, half), parity);
      for (const auto& v : p.values) e += std::norm(v);
    }
    return e;
  };

  for (int root = 0; root < n; ++root) {
    if (members_of[root].empty()) continue;
    Cluster cl;
    cplx sum = 0.0;
    double share[4] = {0, 0, 0, 0};
    for (int idx : members_of[root]) {
      sum += sys.values[idx];
      const Eigen::VectorXcd vec = sys.vectors.col(idx);
      share[0] += subspace_energy(vec, grid::Symmetry::PeriodicHalf, grid::Symmetry::Even);
      share[1] += subspace_energy(vec, grid::Symmetry::PeriodicHalf, grid::Symmetry::Odd);
      share[2] += subspace_energy(vec, grid::Symmetry::AntiperiodicHalf, grid::Symmetry::Even);
      share[3] += subspace_energy(vec, grid::Symmetry::AntiperiodicHalf, grid::Symmetry::Odd);
    }
    cl.multiplicity = static_cast<int>(members_of[root].size());
    cl.center = sum / static_cast<double>(cl.multiplicity);
    const double total = share[0] + share[1] + share[2] + share[3];
    for (int s = 0; s < 4; ++s) cl.share[s] = (total > 0.0) ? share[s] / total : 0.0;

    const SymmetryLabel fine[4] = {SymmetryLabel::PeriodicEven, SymmetryLabel::PeriodicOdd,
                                   SymmetryLabel::AntiperiodicEven,
                                   SymmetryLabel::AntiperiodicOdd};
    cl.label = SymmetryLabel::Mixed;
    for (int s = 0; s < 4; ++s) {
      if (cl.share[s] >= 0.99) cl.label = fine[s];
    }
    if (cl.label == SymmetryLabel::Mixed) {
      if (cl.share[0] + cl.share[1] >= 0.99) cl.label = SymmetryLabel::Periodic;
      else if (cl.share[2] + cl.share[3] >= 0.99) cl.label = SymmetryLabel::Antiperiodic;
      else if (cl.share[0] + cl.share[2] >= 0.99) cl.label = SymmetryLabel::Even;
      else if (cl.share[1] + cl.share[3] >= 0.99) cl.label = SymmetryLabel::Odd;
    }
    rep.clusters.push_back(cl);
  }

  std::sort(rep.clusters.begin(), rep.clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
    return a.center.imag() < b.center.imag();
  });
  return rep;
}

std::vector<BlochPoint> bloch_sweep(waves::WaveKind kind, double k,
                                    const std::vector<double>& thetas, int L,
                                    int fd_order, int workers) {
  require(is_elliptic(kind), "bloch_sweep: elliptic families only");
  const auto params = waves::canonical_params(kind, k);
  const EllipticModulus em(k);
  // Fundamental period of u^2 is 2K for all three families, so the Bloch
  // cell is [0, 2 pi / 2K).
  const grid::Grid g(L, 2.0 * em.K);
  const double cell = 2.0 * pi / g.period;
  for (double t : thetas) {
    require(t >= 0.0 && t < cell, "bloch_sweep: theta must lie in [0, 2 pi / T)");
  }
  const Field u = sample_profile(kind, k, g);

  std::vector<BlochPoint> out(thetas.size());
  std::atomic<size_t> next{0};
  std::exception_ptr fail;
  std::mutex fail_mu;

  auto body = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= thetas.size()) return;
      try {
        LinearizationSpec spec{u, params.a, params.b, thetas[i], fd_order};
        out[i] = {thetas[i], eigenvalues(build_JL(spec))};
      } catch (...) {
        std::lock_guard<std::mutex> lock(fail_mu);
        if (!fail) fail = std::current_exception();
        return;
      }
    }
  };

  int W = workers > 0 ? workers : static_cast<int>(std::thread::hardware_concurrency());
  W = std::max(1, std::min<int>(W, static_cast<int>(thetas.size())));
  if (W == 1) {
    body();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(W);
    for (int w = 0; w < W; ++w) pool.emplace_back(body);
    for (auto& t : pool) t.join();
  }
  if (fail) std::rethrow_exception(fail);
  return out;
}

} // namespace pnls::spectral
