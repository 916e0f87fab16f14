#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tau/chain.hpp"
#include "tau/expr.hpp"
#include "tau/orbit_grid.hpp"
#include "tau/tau_map.hpp"

namespace tau {

using nlohmann::json;

/// {"type": "linear", "q", "h"} | {"type": "fractional", "a"} | {"type": "power", "p"}
/// | {"type": "compose", "outer": map, "inner": map}
TauMap parse_map(const json& j);

struct LevelZeroSpec {
  enum class Kind { Direct, Coefficients } kind = Kind::Direct;
  std::string B, eta, h = "1", f = "0";
  std::string alpha, beta, gamma, h0 = "1";
  double lambda = 0.0;
  /// phi_0 / h_0 at the first point of every segment; required with coefficient input.
  std::optional<double> seed;
};

struct ChainSpec {
  enum class Source { Explicit, Xi, Preset } source = Source::Explicit;
  int levels = 5;
  std::string g = "1", h = "1";
  double d = 1.0;
  double c = 0.0;
  double xi0_inv = 1.0;
};

struct RunConfig {
  std::string preset;
  json map;
  GridSpec grid;
  Expr::Constants constants;
  std::optional<LevelZeroSpec> level0;
  ChainSpec chain;
  /// Preset parameters: q, a, x0, b0, beta_root, kappa2, a_coef, b_coef.
  json params = json::object();
  std::string out = "out";
  std::vector<std::string> emit{"csv", "json"};
  json source;
};

/// JSON of a named preset: qhahn, constg, fractional, xi.
json preset_json(const std::string& name);
std::vector<std::string> preset_names();

/// Merges the preset named in j (if any) under j, then parses. Unknown keys,
/// bad types and unresolvable level-0 specs raise ConfigError.
RunConfig parse_config(const json& j);

/// --depth override: grid depth and preset depth together.
void set_depth(RunConfig& cfg, int depth);

GridPtr build_config_grid(const RunConfig& cfg);

struct ResidualRow {
  int k = 0;
  double pearson = 0.0;
  /// Chain equation and factorization to level k + 1; negative when not applicable.
  double chain = -1.0;
  double factorization = -1.0;
  /// Eigen residual of the level's reference eigenfunction; negative when none.
  double eigen = -1.0;
  /// Pointwise |A psi| / scale for a kernel function of A; negative when none.
  double kernel = -1.0;
};

struct ResidualThresholds {
  double pearson = 1e-9;
  double chain = 1e-9;
  double factorization = 1e-9;
  double eigen = 1e-7;
  double kernel = 1e-9;
};

struct ChainRun {
  GridPtr grid;
  std::vector<ChainLevel> levels;
  /// Reference eigenfunctions per level (may be empty).
  std::vector<GridFunction> eigenfunctions;
  std::vector<cplx> eigenvalues;
  /// Kernel functions of A per level, checked away from the fixed points.
  std::vector<GridFunction> kernels;
  std::vector<ResidualRow> residuals;
  std::vector<double> lambda_history;
};

ChainRun run_chain(const RunConfig& cfg);

/// Name of the first residual above its threshold, empty when all pass.
std::string first_failure(const ChainRun& run, const ResidualThresholds& t = {});

/// Manifest: k, c, d, lambda history and the residual table.
json chain_manifest(const RunConfig& cfg, const ChainRun& run);

}  // namespace tau
