#pragma once

#include <string>
#include <vector>

#include "pnls/branch.hpp"
#include "pnls/flow.hpp"
#include "pnls/grid.hpp"
#include "pnls/spectral.hpp"

// Export of fields, flow histories and spectra.  Numbers are printed with
// %.15g everywhere so files round-trip doubles and identical runs produce
// identical bytes (no timestamps).

namespace pnls::io {

std::string fmt(double v);

void write_field_csv(const std::string& path, const grid::Field& f);
void write_field_json(const std::string& path, const grid::Field& f);
grid::Field read_field_json(const std::string& path);

void write_history_csv(const std::string& path, const flow::FlowResult& r);
void write_watch_csv(const std::string& path, const flow::FlowResult& r,
                     const flow::FlowConfig& cfg);

void write_spectrum_csv(const std::string& path,
                        const std::vector<grid::cplx>& eigenvalues);
void write_bloch_csv(const std::string& path,
                     const std::vector<spectral::BlochPoint>& sweep);
void write_tangency_csv(const std::string& path,
                        const branch::TangencyCheck& t);

} // namespace pnls::io
