#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pnls/branch.hpp"
#include "pnls/elliptic.hpp"
#include "pnls/flow.hpp"
#include "pnls/functionals.hpp"
#include "pnls/io.hpp"
#include "pnls/spectral.hpp"
#include "pnls/version.hpp"
#include "pnls/waves.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace pnls;
using std::numbers::pi;

namespace {

// Every run leaves a manifest naming its parameters and output files, with
// no timestamps, so identical invocations produce identical bytes.
struct Manifest {
  json doc;
  fs::path dir;

  Manifest(const std::string& out_dir, const std::string& sub) : dir(out_dir) {
    doc["tool"] = "pnls";
    doc["version"] = kVersion;
    doc["subcommand"] = sub;
    doc["parameters"] = json::object();
    doc["outputs"] = json::array();
    fs::create_directories(dir);
  }
  template <typename T>
  void param(const std::string& key, const T& v) {
    doc["parameters"][key] = v;
  }
  std::string out_file(const std::string& name) {
    doc["outputs"].push_back(name);
    return (dir / name).string();
  }
  void write() {
    std::ofstream f(dir / "manifest.json");
    f << doc.dump(1) << '\n';
  }
};

waves::WaveKind parse_family(const std::string& s) {
  if (s == "dn") return waves::WaveKind::Dn;
  if (s == "cn") return waves::WaveKind::Cn;
  if (s == "sn") return waves::WaveKind::Sn;
  throw std::domain_error("unknown wave family: " + s);
}

const char* family_name(waves::WaveKind kind) {
  switch (kind) {
    case waves::WaveKind::Dn: return "dn";
    case waves::WaveKind::Cn: return "cn";
    case waves::WaveKind::Sn: return "sn";
    case waves::WaveKind::Constant: return "constant";
    default: return "planewave";
  }
}

grid::Field initial_datum(const std::string& spec, const grid::Grid& g) {
  grid::Field f(g);
  if (spec == "a") {
    for (auto& v : f.values) v = 5.0;
  } else if (spec == "b") {
    for (int l = 0; l < g.size; ++l) {
      f.values[l] = std::polar(1.0, 2.0 * pi * g.node(l) / g.period);
    }
  } else if (spec == "c") {
    for (int l = 0; l < g.size; ++l) {
      f.values[l] = grid::cplx(1.0 + std::cos(2.0 * pi * g.node(l) / g.period), 1.0);
    }
  } else if (spec.rfind("file:", 0) == 0) {
    f = io::read_field_json(spec.substr(5));
    if (!(f.grid == g)) {
      throw std::domain_error("initial datum file grid does not match --grid-size/--period");
    }
  } else {
    throw std::domain_error("unknown initial datum (use a, b, c, or file:PATH): " + spec);
  }
  return f;
}

const char* stop_name(flow::StopReason r) {
  switch (r) {
    case flow::StopReason::SuccessiveTol: return "successive-tol";
    case flow::StopReason::ReferenceTol: return "reference-tol";
    case flow::StopReason::MaxIters: return "max-iters";
    default: return "solver-failure";
  }
}

// ---------------------------------------------------------------- elliptic

int cmd_elliptic(double k, std::optional<double> x, const std::string& out_dir) {
  Manifest mf(out_dir, "elliptic");
  mf.param("k", k);

  json results;
  if (k < 1.0) {
    const double K = elliptic::complete_k(k);
    results["K"] = K;
    std::cout << "K = " << io::fmt(K) << '\n';
  }
  const double E = elliptic::complete_e(k);
  results["E"] = E;
  std::cout << "E = " << io::fmt(E) << '\n';

  if (x) {
    mf.param("x", *x);
    const auto j = elliptic::jacobi(*x, k);
    results["sn"] = j.sn;
    results["cn"] = j.cn;
    results["dn"] = j.dn;
    std::cout << "sn = " << io::fmt(j.sn) << '\n'
              << "cn = " << io::fmt(j.cn) << '\n'
              << "dn = " << io::fmt(j.dn) << '\n';
    if (k < 1.0) {
      const double eps = elliptic::jacobi_epsilon(*x, k);
      results["epsilon"] = eps;
      std::cout << "epsilon = " << io::fmt(eps) << '\n';
    }
  }
  mf.doc["results"] = results;
  mf.write();
  return 0;
}

// ---------------------------------------------------------------- minimize

struct PresetSetup {
  flow::FlowConfig cfg;
  grid::Grid g;
  std::string description;
};

PresetSetup make_preset(const std::string& name, double k, int L) {
  const elliptic::EllipticModulus em(k);
  PresetSetup s;
  auto ref_profile = [&](const waves::WaveParams& p) {
    return waves::profile_samples(p, s.g);
  };

  if (name == "const-focusing") {
    // focusing, mass below the dn threshold: the constant state wins
    const double T = 2.0 * em.K, b = 2.0;
    const double m = pi * pi / (8.0 * em.K); // half of pi^2 / (b T)
    s.g = grid::Grid(L, T);
    s.cfg.b = b;
    s.cfg.mass = m;
    s.cfg.reference = ref_profile(waves::constant_params(b, T, m));
    s.description = "focusing, sub-threshold mass: constant state";
  } else if (name == "dn") {
    const double T = 2.0 * em.K, b = 2.0;
    const auto dn = waves::canonical_params(waves::WaveKind::Dn, k);
    s.g = grid::Grid(L, T);
    s.cfg.b = b;
    s.cfg.mass = waves::mass_of(dn);
    s.cfg.reference = ref_profile(dn);
    s.description = "focusing, dn mass: dn wave";
  } else if (name == "const-defocusing") {
    const double T = 4.0 * em.K, b = -2.0 * k * k;
    const double m = waves::mass_of(waves::canonical_params(waves::WaveKind::Sn, k));
    s.g = grid::Grid(L, T);
    s.cfg.b = b;
    s.cfg.mass = m;
    s.cfg.reference = ref_profile(waves::constant_params(b, T, m));
    s.description = "defocusing, periodic sector: constant state";
  } else if (name == "cn") {
    const double T = 4.0 * em.K, b = 2.0 * k * k;
    const auto cn = waves::canonical_params(waves::WaveKind::Cn, k);
    s.g = grid::Grid(L, T);
    s.cfg.b = b;
    s.cfg.mass = waves::mass_of(cn);
    s.cfg.enforce_antiperiodic = true;
    s.cfg.reference = ref_profile(cn);
    s.description = "focusing, anti-periodic sector: cn wave";
  } else if (name == "planewave" || name == "sn-momentum") {
    const double T = 4.0 * em.K, b = -2.0 * k * k;
    const auto sn = waves::canonical_params(waves::WaveKind::Sn, k);
    const double m = waves::mass_of(sn);
    s.g = grid::Grid(L, T);
    s.cfg.b = b;
    s.cfg.mass = m;
    s.cfg.enforce_antiperiodic = true;
    const auto pw = waves::plane_wave_params(b, T, m, 1);
    if (name == "planewave") {
      s.cfg.reference = ref_profile(pw);
      s.cfg.max_iters = 600;
      s.description = "defocusing, anti-periodic sector: plane wave (sn plateau en route)";
    } else {
      s.cfg.enforce_momentum = true;
      s.cfg.momentum = 0.0;
      s.cfg.reference = ref_profile(sn);
      s.description = "defocusing, anti-periodic sector, momentum 0: sn wave";
    }
    s.cfg.watches.push_back({"dist_sn", ref_profile(sn)});
    s.cfg.watches.push_back({"dist_planewave", ref_profile(pw)});
  } else {
    throw std::domain_error("unknown preset: " + name);
  }
  return s;
}

int cmd_minimize(const std::string& preset, double k, int L, double dt, double tol,
                 int max_iters, const std::string& init,
                 std::optional<double> manual_b, std::optional<double> manual_T,
                 std::optional<double> manual_m, std::optional<double> momentum,
                 bool antiperiodic, bool varpi_from_update,
                 const std::string& out_dir) {
  Manifest mf(out_dir, "minimize");
  PresetSetup setup;
  if (!preset.empty()) {
    setup = make_preset(preset, k, L);
    mf.param("preset", preset);
    mf.param("k", k);
  } else {
    if (!manual_b || !manual_T || !manual_m) {
      throw std::domain_error("minimize: without --preset, all of --b, --period, --mass are required");
    }
    setup.g = grid::Grid(L, *manual_T);
    setup.cfg.b = *manual_b;
    setup.cfg.mass = *manual_m;
    setup.cfg.enforce_antiperiodic = antiperiodic;
    if (momentum) {
      setup.cfg.enforce_momentum = true;
      setup.cfg.momentum = *momentum;
    }
    setup.description = "manual run";
  }
  setup.cfg.dt = dt;
  setup.cfg.tol = tol;
  if (max_iters > 0) setup.cfg.max_iters = max_iters;
  setup.cfg.varpi_from_update = varpi_from_update;

  mf.param("grid_size", setup.g.size);
  mf.param("period", setup.g.period);
  mf.param("b", setup.cfg.b);
  mf.param("mass", setup.cfg.mass);
  mf.param("dt", setup.cfg.dt);
  mf.param("tol", setup.cfg.tol);
  mf.param("max_iters", setup.cfg.max_iters);
  mf.param("init", init);
  mf.param("antiperiodic", setup.cfg.enforce_antiperiodic);
  if (setup.cfg.enforce_momentum) mf.param("momentum", setup.cfg.momentum);
  mf.param("varpi_from_update", setup.cfg.varpi_from_update);

  const grid::Field u0 = initial_datum(init, setup.g);
  const auto result = flow::run_flow(u0, setup.cfg);

  io::write_field_csv(mf.out_file("final_profile.csv"), result.final);
  io::write_field_json(mf.out_file("final_profile.json"), result.final);
  io::write_history_csv(mf.out_file("history.csv"), result);
  if (!setup.cfg.watches.empty()) {
    io::write_watch_csv(mf.out_file("watch.csv"), result, setup.cfg);
  }

  const auto rep = result.history.back();
  json summary;
  summary["iterations"] = result.iterations;
  summary["converged"] = result.converged;
  summary["stop_reason"] = stop_name(result.stop_reason);
  summary["final_mass"] = rep.mass;
  summary["final_momentum"] = rep.momentum;
  summary["final_energy"] = rep.energy;
  if (!result.reference_distance.empty()) {
    summary["final_reference_distance"] = result.reference_distance.back();
  }
  mf.doc["results"] = summary;
  mf.write();

  std::cout << setup.description << '\n';
  std::cout << (result.converged ? "converged" : "did not converge") << " after "
            << result.iterations << " iterations (" << stop_name(result.stop_reason)
            << ")\n";
  std::cout << "final mass = " << io::fmt(rep.mass)
            << ", momentum = " << io::fmt(rep.momentum)
            << ", energy = " << io::fmt(rep.energy) << '\n';
  if (!result.reference_distance.empty()) {
    std::cout << "reference distance = " << io::fmt(result.reference_distance.back())
              << '\n';
  }
  return result.converged ? 0 : 4;
}

// ---------------------------------------------------------------- spectrum

int cmd_spectrum(const std::string& family, double k, int copies, int L, int order,
                 std::optional<double> tol, const std::string& out_dir) {
  Manifest mf(out_dir, "spectrum");
  mf.param("family", family);
  mf.param("k", k);
  mf.param("copies", copies);
  mf.param("grid_size", L);
  mf.param("fd_order", order);

  const auto rep = spectral::stability_report(parse_family(family), k, copies, L,
                                              order, tol);
  io::write_spectrum_csv(mf.out_file("spectrum.csv"), rep.eigenvalues);

  json jr;
  jr["stable"] = rep.stable;
  jr["max_real_part"] = rep.max_real_part;
  jr["tol"] = rep.tol;
  auto& jcl = jr["clusters"] = json::array();
  for (const auto& cl : rep.clusters) {
    jcl.push_back({{"re", cl.center.real()},
                   {"im", cl.center.imag()},
                   {"multiplicity", cl.multiplicity},
                   {"label", spectral::to_string(cl.label)},
                   {"shares", {cl.share[0], cl.share[1], cl.share[2], cl.share[3]}}});
  }
  std::ofstream(fs::path(out_dir) / "report.json") << jr.dump(1) << '\n';
  mf.doc["outputs"].push_back("report.json");
  mf.doc["results"] = {{"stable", rep.stable},
                       {"max_real_part", rep.max_real_part},
                       {"tol", rep.tol}};
  mf.write();

  std::cout << "stable: " << (rep.stable ? "yes" : "no")
            << " (max |Re| = " << io::fmt(rep.max_real_part)
            << ", tol = " << io::fmt(rep.tol) << ")\n";
  int unstable_clusters = 0;
  for (const auto& cl : rep.clusters) {
    if (std::abs(cl.center.real()) > rep.tol) ++unstable_clusters;
  }
  if (unstable_clusters > 0) {
    std::cout << unstable_clusters << " cluster(s) off the imaginary axis\n";
  }
  return 0;
}

// ---------------------------------------------------------------- bloch

int cmd_bloch(const std::string& family, double k, int count, int L, int order,
              int workers, const std::string& out_dir) {
  Manifest mf(out_dir, "bloch");
  mf.param("family", family);
  mf.param("k", k);
  mf.param("theta_count", count);
  mf.param("grid_size", L);
  mf.param("fd_order", order);
  mf.param("workers", workers);

  if (count < 1) throw std::domain_error("bloch: --theta-count must be positive");
  const elliptic::EllipticModulus em(k);
  const double cell = 2.0 * pi / (2.0 * em.K);
  std::vector<double> thetas(count);
  for (int i = 0; i < count; ++i) thetas[i] = cell * i / count;

  const auto sweep = spectral::bloch_sweep(parse_family(family), k, thetas, L,
                                           order, workers);
  io::write_bloch_csv(mf.out_file("bloch.csv"), sweep);

  double max_re = 0.0, at_theta = 0.0;
  for (const auto& pt : sweep) {
    for (const auto& ev : pt.eigenvalues) {
      if (std::abs(ev.real()) > max_re) {
        max_re = std::abs(ev.real());
        at_theta = pt.theta;
      }
    }
  }
  mf.doc["results"] = {{"max_real_part", max_re}, {"argmax_theta", at_theta}};
  mf.write();
  std::cout << "max |Re lambda| over the sweep = " << io::fmt(max_re)
            << " at theta = " << io::fmt(at_theta) << '\n';
  return 0;
}

// ---------------------------------------------------------------- branch

int cmd_branch(double k, std::vector<double> epsilons, int L, int order,
               bool with_numeric, int numeric_L, bool skip_tangency,
               const std::string& out_dir) {
  Manifest mf(out_dir, "branch");
  mf.param("k", k);
  mf.param("grid_size", L);
  mf.param("fd_order", order);
  mf.param("epsilons", epsilons);
  mf.param("numeric", with_numeric);

  const auto c = branch::coeffs(k);
  json jb;
  jb["k"] = c.k;
  jb["A1"] = c.A1;
  jb["A2"] = c.A2;
  jb["B_im"] = c.B.imag();
  jb["C1"] = c.C1;
  jb["C2"] = c.C2;
  jb["discriminant"] = c.discriminant;
  jb["discriminant_closed_form"] = branch::discriminant_closed_form(k);
  jb["lambda1"] = {c.lambda1.real(), c.lambda1.imag()};
  jb["b0"] = {c.b0.real(), c.b0.imag()};

  std::cout << "A1 = " << io::fmt(c.A1) << ", A2 = " << io::fmt(c.A2)
            << ", B = " << io::fmt(c.B.imag()) << "i, C1 = " << io::fmt(c.C1)
            << ", C2 = " << io::fmt(c.C2) << '\n';
  std::cout << "discriminant = " << io::fmt(c.discriminant)
            << " (closed form " << io::fmt(branch::discriminant_closed_form(k))
            << ")\n";
  std::cout << "lambda1 = " << io::fmt(c.lambda1.real()) << " + "
            << io::fmt(c.lambda1.imag()) << "i\n";

  if (with_numeric) {
    const auto params = waves::canonical_params(waves::WaveKind::Cn, k);
    const elliptic::EllipticModulus em(k);
    const grid::Grid g(numeric_L, 2.0 * em.K);
    grid::Field u(g);
    for (int l = 0; l < g.size; ++l) {
      u.values[l] = elliptic::jacobi(g.node(l), k).cn;
    }
    const auto nc = branch::numeric_coeffs(u, params.a, params.b, order);
    jb["numeric"] = {{"A1", nc.A1},         {"A2", nc.A2},
                     {"B_im", nc.B.imag()}, {"C1", nc.C1},
                     {"C2", nc.C2},         {"discriminant", nc.discriminant},
                     {"grid_size", numeric_L}};
    std::cout << "numeric (L = " << numeric_L << "): A1 = " << io::fmt(nc.A1)
              << ", A2 = " << io::fmt(nc.A2) << ", B = " << io::fmt(nc.B.imag())
              << "i, C1 = " << io::fmt(nc.C1) << ", C2 = " << io::fmt(nc.C2)
              << '\n';
  }

  if (!skip_tangency) {
    const auto t = branch::tangency_check(k, epsilons, L, order);
    io::write_tangency_csv(mf.out_file("tangency.csv"), t);
    auto& jt = jb["tangency"] = json::array();
    for (const auto& p : t.points) {
      jt.push_back({{"epsilon", p.epsilon},
                    {"eigenvalue", {p.eigenvalue.real(), p.eigenvalue.imag()}},
                    {"predicted", {p.predicted.real(), p.predicted.imag()}},
                    {"matched", p.matched}});
      std::cout << "epsilon = " << io::fmt(p.epsilon) << ": lambda = "
                << io::fmt(p.eigenvalue.real()) << " + "
                << io::fmt(p.eigenvalue.imag()) << "i, predicted "
                << io::fmt(p.predicted.real()) << " + "
                << io::fmt(p.predicted.imag()) << "i"
                << (p.matched ? "" : "  [no match]") << '\n';
    }
    std::cout << (t.all_matched ? "tangency confirmed at every epsilon"
                                : "tangency NOT confirmed")
              << '\n';
  }

  std::ofstream(fs::path(out_dir) / "branch.json") << jb.dump(1) << '\n';
  mf.doc["outputs"].push_back("branch.json");
  mf.write();
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"periodic standing waves of the cubic Schrodinger equation: "
               "normalized gradient flow and spectral stability"};
  app.require_subcommand(1);

  // elliptic
  auto* ell = app.add_subcommand("elliptic", "evaluate K, E, sn, cn, dn, epsilon");
  double ell_k = 0.0;
  std::optional<double> ell_x;
  std::string ell_out = ".";
  ell->add_option("--k", ell_k, "modulus")->required();
  ell->add_option("--x", ell_x, "argument for sn/cn/dn/epsilon");
  ell->add_option("--out", ell_out, "output directory");

  // minimize
  auto* mini = app.add_subcommand("minimize", "run the normalized gradient flow");
  std::string mini_preset, mini_init = "c", mini_out = ".";
  double mini_k = 0.9, mini_dt = 1.0, mini_tol = 1e-3;
  int mini_L = 1024, mini_iters = 0;
  std::optional<double> mini_b, mini_T, mini_m, mini_p;
  bool mini_antiper = false, mini_varpi_update = false;
  mini->add_option("--preset", mini_preset,
                   "const-focusing | dn | const-defocusing | cn | planewave | sn-momentum");
  mini->add_option("--k", mini_k, "modulus used by the preset");
  mini->add_option("--grid-size", mini_L, "number of nodes");
  mini->add_option("--dt", mini_dt, "time step");
  mini->add_option("--tol", mini_tol, "stopping tolerance");
  mini->add_option("--max-iters", mini_iters, "iteration cap (0 = preset default)");
  mini->add_option("--init", mini_init, "initial datum: a | b | c | file:PATH");
  mini->add_option("--b", mini_b, "cubic coefficient (manual run)");
  mini->add_option("--period", mini_T, "period (manual run)");
  mini->add_option("--mass", mini_m, "target mass (manual run)");
  mini->add_option("--momentum", mini_p, "target momentum (manual run; enables the constraint)");
  mini->add_flag("--antiperiodic", mini_antiper, "project onto anti-periodic fields (manual run)");
  mini->add_flag("--varpi-from-update", mini_varpi_update,
                 "compute the momentum multiplier from the updated iterate");
  mini->add_option("--out", mini_out, "output directory");

  // spectrum
  auto* spec = app.add_subcommand("spectrum", "JL spectrum and stability verdict");
  std::string spec_family = "dn", spec_out = ".";
  double spec_k = 0.9;
  int spec_copies = 1, spec_L = 1024, spec_order = 4;
  std::optional<double> spec_tol;
  spec->add_option("--family", spec_family, "dn | cn | sn")->required();
  spec->add_option("--k", spec_k, "modulus")->required();
  spec->add_option("--copies", spec_copies, "number of fundamental periods");
  spec->add_option("--grid-size", spec_L, "number of nodes");
  spec->add_option("--fd-order", spec_order, "stencil order (2 or 4)");
  spec->add_option("--tol", spec_tol, "stability tolerance override");
  spec->add_option("--out", spec_out, "output directory");

  // bloch
  auto* blo = app.add_subcommand("bloch", "JL(theta) sweep over the Bloch cell");
  std::string blo_family = "cn", blo_out = ".";
  double blo_k = 0.9;
  int blo_count = 64, blo_L = 256, blo_order = 4, blo_workers = 0;
  blo->add_option("--family", blo_family, "dn | cn | sn")->required();
  blo->add_option("--k", blo_k, "modulus")->required();
  blo->add_option("--theta-count", blo_count, "number of theta samples");
  blo->add_option("--grid-size", blo_L, "number of nodes");
  blo->add_option("--fd-order", blo_order, "stencil order (2 or 4)");
  blo->add_option("--workers", blo_workers, "worker threads (0 = hardware)");
  blo->add_option("--out", blo_out, "output directory");

  // branch
  auto* bra = app.add_subcommand("branch", "cn instability branch coefficients");
  double bra_k = 0.9;
  std::vector<double> bra_eps = {0.02, 0.01, 0.005};
  int bra_L = 256, bra_order = 4, bra_numeric_L = 1024;
  bool bra_numeric = false, bra_skip_tangency = false;
  std::string bra_out = ".";
  bra->add_option("--k", bra_k, "modulus")->required();
  bra->add_option("--epsilons", bra_eps, "distances to the Bloch edge");
  bra->add_option("--grid-size", bra_L, "nodes for the tangency spectra");
  bra->add_option("--fd-order", bra_order, "stencil order (2 or 4)");
  bra->add_flag("--numeric", bra_numeric, "recompute the coefficients from the discrete operators");
  bra->add_option("--numeric-grid-size", bra_numeric_L, "nodes for the numeric recomputation");
  bra->add_flag("--skip-tangency", bra_skip_tangency, "skip the edge spectra");
  bra->add_option("--out", bra_out, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*ell) return cmd_elliptic(ell_k, ell_x, ell_out);
    if (*mini) {
      return cmd_minimize(mini_preset, mini_k, mini_L, mini_dt, mini_tol,
                          mini_iters, mini_init, mini_b, mini_T, mini_m, mini_p,
                          mini_antiper, mini_varpi_update, mini_out);
    }
    if (*spec) {
      return cmd_spectrum(spec_family, spec_k, spec_copies, spec_L, spec_order,
                          spec_tol, spec_out);
    }
    if (*blo) {
      return cmd_bloch(blo_family, blo_k, blo_count, blo_L, blo_order,
                       blo_workers, blo_out);
    }
    if (*bra) {
      return cmd_branch(bra_k, bra_eps, bra_L, bra_order, bra_numeric,
                        bra_numeric_L, bra_skip_tangency, bra_out);
    }
  } catch (const std::domain_error& e) {
    std::cerr << "domain error: " << e.what() << '\n';
    return 2;
  } catch (const flow::solver_error& e) {
    std::cerr << "solver error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
