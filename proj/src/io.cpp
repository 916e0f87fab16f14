#include "tau/io.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "tau/error.hpp"

namespace tau {

namespace {

std::string cell(const GridFunction& f, std::size_t i) { return f.valid(i) ? fmt17(f[i].real()) : "nan"; }

double parse_double(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(ErrorKind::ConfigError, "bad number '" + s + "' in CSV");
  }
  return v;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(item);
  return out;
}

}  // namespace

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_grid_csv(std::ostream& os, const OrbitGrid& grid) {
  os << "n,point,delta\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    os << grid.orbit_index(i) << ',' << fmt17(grid.point(i)) << ',' << fmt17(grid.delta(i)) << '\n';
  }
}

void write_function_csv(std::ostream& os, const GridFunction& f) {
  const auto& g = f.grid();
  os << "n,x,re,im,valid\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g.orbit_index(i) << ',' << fmt17(g.point(i)) << ',' << fmt17(f[i].real()) << ',' << fmt17(f[i].imag())
       << ',' << (f.valid(i) ? 1 : 0) << '\n';
  }
}

GridFunction read_function_csv(std::istream& is, const GridPtr& grid) {
  std::string line;
  if (!std::getline(is, line) || line != "n,x,re,im,valid") {
    throw Error(ErrorKind::ConfigError, "grid function CSV needs the header n,x,re,im,valid");
  }
  std::vector<cplx> values;
  std::vector<std::uint8_t> valid;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cols = split(line);
    if (cols.size() != 5) throw Error(ErrorKind::ConfigError, "grid function CSV row needs 5 columns: " + line);
    const std::size_t i = values.size();
    if (i >= grid->size()) throw Error(ErrorKind::GridMismatch, "more CSV rows than grid points");
    const double x = parse_double(cols[1]);
    if (std::abs(x - grid->point(i)) > 1e-15 * (1.0 + std::abs(x))) {
      throw Error(ErrorKind::GridMismatch, "CSV row " + std::to_string(i) + " sits at x=" + cols[1]);
    }
    values.emplace_back(parse_double(cols[2]), parse_double(cols[3]));
    valid.push_back(cols[4] == "1" ? 1 : 0);
  }
  if (values.size() != grid->size()) throw Error(ErrorKind::GridMismatch, "fewer CSV rows than grid points");
  return GridFunction(grid, std::move(values), std::move(valid));
}

void write_weighted_csv(std::ostream& os, const WeightedGrid& w) {
  const auto& g = w.grid();
  os << "n,x,rho,delta,positivity\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g.orbit_index(i) << ',' << fmt17(g.point(i)) << ',' << cell(w.rho, i) << ',' << fmt17(g.delta(i)) << ','
       << (w.positivity[i] ? 1 : 0) << '\n';
  }
}

void write_level_csv(std::ostream& os, const ChainLevel& L) {
  const auto& g = L.grid();
  os << "n,x,rho,B,eta,h,f,phi\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g.orbit_index(i) << ',' << fmt17(g.point(i)) << ',' << cell(L.w.rho, i) << ',' << cell(L.B, i) << ','
       << cell(L.eta, i) << ',' << cell(L.h, i) << ',' << cell(L.f, i) << ',' << cell(L.phi, i) << '\n';
  }
}

void write_system_csv(std::ostream& os, const TwoByTwoSystem& sys) {
  const auto& g = sys.grid();
  os << "n,x,a_re,a_im,b_re,b_im,c_re,c_im,d_re,d_im\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g.orbit_index(i) << ',' << fmt17(g.point(i));
    for (const auto* f : {&sys.a, &sys.b, &sys.c, &sys.d}) {
      const bool ok = f->valid(i);
      os << ',' << (ok ? fmt17((*f)[i].real()) : "nan") << ',' << (ok ? fmt17((*f)[i].imag()) : "nan");
    }
    os << '\n';
  }
}

void write_solution_csv(std::ostream& os, const GridFunction& psi, const GridFunction& phi) {
  const auto& g = psi.grid();
  os << "n,x,psi_re,psi_im,phi_re,phi_im\n";
  for (std::size_t i = 0; i < g.size(); ++i) {
    os << g.orbit_index(i) << ',' << fmt17(g.point(i));
    for (const auto* f : {&psi, &phi}) {
      const bool ok = f->valid(i);
      os << ',' << (ok ? fmt17((*f)[i].real()) : "nan") << ',' << (ok ? fmt17((*f)[i].imag()) : "nan");
    }
    os << '\n';
  }
}

nlohmann::json to_json(const ResolventResult& r) {
  return {{"converged", r.converged},
          {"criterion_sum", r.criterion_sum},
          {"cauchy_gap", r.cauchy_gap},
          {"steps", r.steps}};
}

nlohmann::json grid_diagnostics(const OrbitGrid& grid) {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& s : grid.segments()) {
    segs.push_back({{"first_n", s.first_n},
                    {"points", s.points.size()},
                    {"limit", fmt17(s.limit)},
                    {"orientation", s.orientation},
                    {"backward_hit_depth", s.backward_hit_depth},
                    {"forward_hit_depth", s.forward_hit_depth}});
  }
  const char* mode = grid.mode() == OrbitMode::Semigroup ? "semigroup"
                     : grid.mode() == OrbitMode::Interval ? "interval"
                                                          : "group";
  return {{"map", grid.map().name()}, {"mode", mode}, {"size", grid.size()}, {"segments", segs}};
}

void write_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorKind::ConfigError, "cannot write " + path);
  out << text;
}

}  // namespace tau
