#pragma once

#include <iosfwd>
#include <string>

#include "json.hpp"
#include "tau/chain.hpp"
#include "tau/grid_function.hpp"
#include "tau/hilbert.hpp"
#include "tau/orbit_grid.hpp"
#include "tau/riccati.hpp"

namespace tau {

/// 17 significant digits, independent of the locale; "nan" and "inf" spelled out.
std::string fmt17(double v);

/// n, point, delta
void write_grid_csv(std::ostream& os, const OrbitGrid& grid);
/// n, x, re, im, valid
void write_function_csv(std::ostream& os, const GridFunction& f);
/// Inverse of write_function_csv on the same grid; rows must match the grid points.
GridFunction read_function_csv(std::istream& is, const GridPtr& grid);
/// n, x, rho, delta, positivity
void write_weighted_csv(std::ostream& os, const WeightedGrid& w);
/// n, x, rho, B, eta, h, f, phi (real parts; invalid entries are nan)
void write_level_csv(std::ostream& os, const ChainLevel& level);
/// n, x, then re/im of a, b, c, d
void write_system_csv(std::ostream& os, const TwoByTwoSystem& sys);
/// n, x, re/im of psi and phi
void write_solution_csv(std::ostream& os, const GridFunction& psi, const GridFunction& phi);

nlohmann::json to_json(const ResolventResult& r);
/// Segment limits, sizes and truncation flags.
nlohmann::json grid_diagnostics(const OrbitGrid& grid);

/// Writes text to path, creating parent directories.
void write_file(const std::string& path, const std::string& text);

}  // namespace tau
