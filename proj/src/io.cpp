#include "pnls/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace pnls::io {
namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("io: cannot open " + path + " for writing");
  return out;
}

} // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.15g", v);
  return buf;
}

void write_field_csv(const std::string& path, const grid::Field& f) {
  auto out = open_out(path);
  out << "x,re,im,abs\n";
  for (int l = 0; l < f.grid.size; ++l) {
    const auto& v = f.values[l];
    out << fmt(f.grid.node(l)) << ',' << fmt(v.real()) << ',' << fmt(v.imag())
        << ',' << fmt(std::abs(v)) << '\n';
  }
}

void write_field_json(const std::string& path, const grid::Field& f) {
  nlohmann::json j;
  j["grid"] = {{"size", f.grid.size}, {"period", f.grid.period}};
  auto& vals = j["values"] = nlohmann::json::array();
  for (const auto& v : f.values) {
    vals.push_back({v.real(), v.imag()});
  }
  auto out = open_out(path);
  out << j.dump(1) << '\n';
}

grid::Field read_field_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("io: cannot open " + path);
  nlohmann::json j;
  in >> j;
  const grid::Grid g(j.at("grid").at("size").get<int>(),
                     j.at("grid").at("period").get<double>());
  grid::Field f(g);
  const auto& vals = j.at("values");
  if (vals.size() != static_cast<size_t>(g.size)) {
    throw std::runtime_error("io: field length does not match its grid in " + path);
  }
  for (int l = 0; l < g.size; ++l) {
    f.values[l] = grid::cplx(vals[l][0].get<double>(), vals[l][1].get<double>());
  }
  return f;
}

void write_history_csv(const std::string& path, const flow::FlowResult& r) {
  auto out = open_out(path);
  out << "iter,mass,momentum,energy,max_modulus_delta\n";
  for (size_t n = 0; n < r.history.size(); ++n) {
    const auto& h = r.history[n];
    out << n << ',' << fmt(h.mass) << ',' << fmt(h.momentum) << ','
        << fmt(h.energy) << ',';
    if (n == 0) {
      out << "nan";
    } else {
      out << fmt(r.deltas[n]);
    }
    out << '\n';
  }
}

void write_watch_csv(const std::string& path, const flow::FlowResult& r,
                     const flow::FlowConfig& cfg) {
  auto out = open_out(path);
  out << "iter";
  for (const auto& w : cfg.watches) out << ',' << w.name;
  out << '\n';
  const size_t rows = r.history.size();
  for (size_t n = 0; n < rows; ++n) {
    out << n;
    for (const auto& col : r.watch_distance) {
      out << ',' << (n < col.size() ? fmt(col[n]) : "nan");
    }
    out << '\n';
  }
}

void write_spectrum_csv(const std::string& path,
                        const std::vector<grid::cplx>& eigenvalues) {
  auto out = open_out(path);
  out << "re,im\n";
  for (const auto& ev : eigenvalues) {
    out << fmt(ev.real()) << ',' << fmt(ev.imag()) << '\n';
  }
}

void write_bloch_csv(const std::string& path,
                     const std::vector<spectral::BlochPoint>& sweep) {
  auto out = open_out(path);
  out << "theta,re,im\n";
  for (const auto& pt : sweep) {
    for (const auto& ev : pt.eigenvalues) {
      out << fmt(pt.theta) << ',' << fmt(ev.real()) << ',' << fmt(ev.imag()) << '\n';
    }
  }
}

void write_tangency_csv(const std::string& path, const branch::TangencyCheck& t) {
  auto out = open_out(path);
  out << "epsilon,lambda_re,lambda_im,predicted_re,predicted_im,ratio_re,ratio_im,matched\n";
  for (const auto& p : t.points) {
    out << fmt(p.epsilon) << ',' << fmt(p.eigenvalue.real()) << ','
        << fmt(p.eigenvalue.imag()) << ',' << fmt(p.predicted.real()) << ','
        << fmt(p.predicted.imag()) << ',' << fmt(p.ratio.real()) << ','
        << fmt(p.ratio.imag()) << ',' << (p.matched ? 1 : 0) << '\n';
  }
}

} // namespace pnls::io
