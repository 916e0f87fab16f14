#include "tau/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "tau/error.hpp"
#include "tau/hilbert.hpp"
#include "tau/scenarios.hpp"

namespace tau {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) bad(where + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) bad("unknown key '" + k + "' in " + where);
  }
}

double num(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) bad(where + " needs '" + key + "'");
  if (!j.at(key).is_number()) bad(where + "." + key + " must be a number");
  return j.at(key).get<double>();
}

double num_or(const json& j, const std::string& key, double fallback, const std::string& where) {
  return j.contains(key) ? num(j, key, where) : fallback;
}

std::string str_or(const json& j, const std::string& key, const std::string& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_number()) return nlohmann::json(v).dump();
  if (!v.is_string()) bad(where + "." + key + " must be a string or a number");
  return v.get<std::string>();
}

int int_or(const json& j, const std::string& key, int fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer()) bad(where + "." + key + " must be an integer");
  return j.at(key).get<int>();
}

GridSpec parse_grid(const json& j) {
  check_keys(j, {"mode", "bases", "depth", "fixed_point_tol", "truncation_tol", "max_iter", "domain_tol"}, "grid");
  GridSpec s;
  const auto mode = str_or(j, "mode", "semigroup", "grid");
  if (mode == "semigroup") s.mode = OrbitMode::Semigroup;
  else if (mode == "interval") s.mode = OrbitMode::Interval;
  else if (mode == "group") s.mode = OrbitMode::Group;
  else bad("grid.mode must be semigroup, interval or group");
  if (j.contains("bases")) {
    if (!j["bases"].is_array()) bad("grid.bases must be an array");
    for (const auto& b : j["bases"]) {
      if (!b.is_number()) bad("grid.bases entries must be numbers");
      s.bases.push_back(b.get<double>());
    }
  } else {
    s.bases = {1.0};
  }
  const std::size_t want = s.mode == OrbitMode::Interval ? 2 : 1;
  if (s.bases.size() != want) bad("grid.bases needs " + std::to_string(want) + " entries for mode " + mode);
  s.max_depth = int_or(j, "depth", s.max_depth, "grid");
  if (s.max_depth < 1) bad("grid.depth must be positive");
  s.fixed_point_tol = num_or(j, "fixed_point_tol", s.fixed_point_tol, "grid");
  s.truncation_tol = num_or(j, "truncation_tol", s.truncation_tol, "grid");
  s.domain_tol = num_or(j, "domain_tol", s.domain_tol, "grid");
  s.max_iter = std::max(int_or(j, "max_iter", s.max_iter, "grid"), 2 * s.max_depth);
  return s;
}

LevelZeroSpec parse_level0(const json& j) {
  check_keys(j, {"B", "eta", "h", "f", "alpha", "beta", "gamma", "lambda", "h0", "seed"}, "level0");
  LevelZeroSpec s;
  const bool direct = j.contains("B") || j.contains("eta");
  const bool coef = j.contains("alpha") || j.contains("beta") || j.contains("gamma");
  if (direct == coef) bad("level0 needs either B and eta, or alpha, beta and gamma");
  if (direct) {
    if (!j.contains("B") || !j.contains("eta")) bad("level0 direct input needs both B and eta");
    s.kind = LevelZeroSpec::Kind::Direct;
    s.B = str_or(j, "B", "", "level0");
    s.eta = str_or(j, "eta", "", "level0");
    s.h = str_or(j, "h", "1", "level0");
    s.f = str_or(j, "f", "0", "level0");
  } else {
    if (!j.contains("alpha") || !j.contains("beta") || !j.contains("gamma")) {
      bad("level0 coefficient input needs alpha, beta and gamma");
    }
    s.kind = LevelZeroSpec::Kind::Coefficients;
    s.alpha = str_or(j, "alpha", "", "level0");
    s.beta = str_or(j, "beta", "", "level0");
    s.gamma = str_or(j, "gamma", "", "level0");
    s.h0 = str_or(j, "h0", "1", "level0");
    s.lambda = num_or(j, "lambda", 0.0, "level0");
    if (!j.contains("seed")) bad("level0 coefficient input needs the seed phi_0 / h_0 at the first grid point (level0.seed)");
    s.seed = num(j, "seed", "level0");
  }
  return s;
}

ChainSpec parse_chain(const json& j) {
  check_keys(j, {"levels", "source", "g", "h", "d", "c", "xi0_inv"}, "chain");
  ChainSpec s;
  const auto src = str_or(j, "source", "explicit", "chain");
  if (src == "explicit") s.source = ChainSpec::Source::Explicit;
  else if (src == "xi") s.source = ChainSpec::Source::Xi;
  else if (src == "preset") s.source = ChainSpec::Source::Preset;
  else bad("chain.source must be explicit, xi or preset");
  s.levels = int_or(j, "levels", s.levels, "chain");
  if (s.levels < 0) bad("chain.levels must be non-negative");
  s.g = str_or(j, "g", s.g, "chain");
  s.h = str_or(j, "h", s.h, "chain");
  s.d = num_or(j, "d", s.d, "chain");
  s.c = num_or(j, "c", s.c, "chain");
  s.xi0_inv = num_or(j, "xi0_inv", s.xi0_inv, "chain");
  return s;
}

double param(const RunConfig& cfg, const std::string& key, double fallback) {
  return num_or(cfg.params, key, fallback, "params");
}

GridFunction sample(const GridPtr& g, const std::string& text, const Expr::Constants& consts) {
  const auto e = Expr::parse(text, consts);
  return GridFunction::sample_real(g, [&e](double x) { return e(x); }, text);
}

}  // namespace

TauMap parse_map(const json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string()) bad("map needs a string 'type'");
  const auto type = j["type"].get<std::string>();
  if (type == "linear") {
    check_keys(j, {"type", "q", "h"}, "map");
    return TauMap::linear(num(j, "q", "map"), num_or(j, "h", 0.0, "map"));
  }
  if (type == "fractional") {
    check_keys(j, {"type", "a"}, "map");
    return TauMap::fractional(num(j, "a", "map"));
  }
  if (type == "power") {
    check_keys(j, {"type", "p"}, "map");
    return TauMap::power(num(j, "p", "map"));
  }
  if (type == "compose") {
    check_keys(j, {"type", "outer", "inner"}, "map");
    if (!j.contains("outer") || !j.contains("inner")) bad("compose map needs outer and inner");
    return TauMap::compose(parse_map(j["outer"]), parse_map(j["inner"]));
  }
  bad("unknown map type '" + type + "'");
}

std::vector<std::string> preset_names() { return {"qhahn", "constg", "fractional", "xi"}; }

json preset_json(const std::string& name) {
  if (name == "qhahn") {
    return {{"map", {{"type", "linear"}, {"q", 0.5}}},
            {"grid", {{"mode", "semigroup"}, {"bases", {1.0}}, {"depth", 40}}},
            {"params", {{"q", 0.5}}},
            {"chain", {{"source", "preset"}, {"levels", 5}}}};
  }
  if (name == "constg") {
    return {{"map", {{"type", "linear"}, {"q", 0.7}}},
            {"grid", {{"mode", "semigroup"}, {"bases", {1.0}}, {"depth", 20}}},
            {"params", {{"q", 0.7}, {"b0", 1.0}, {"beta_root", 2.0}, {"kappa2", 0.3}}},
            {"chain", {{"source", "preset"}, {"levels", 5}}}};
  }
  if (name == "fractional") {
    return {{"map", {{"type", "fractional"}, {"a", 2.0}}},
            {"grid", {{"mode", "group"}, {"bases", {0.5}}, {"depth", 200}}},
            {"params", {{"a", 2.0}, {"x0", 0.5}, {"a_coef", 1.3}, {"b_coef", 0.7}}},
            {"chain", {{"source", "preset"}, {"levels", 3}}}};
  }
  if (name == "xi") {
    return {{"map", {{"type", "linear"}, {"q", 0.5}}},
            {"grid", {{"mode", "semigroup"}, {"bases", {1.0}}, {"depth", 60}}},
            {"level0", {{"B", "1 + x"}, {"eta", "1 + 2*x"}, {"h", "1"}, {"f", "0"}}},
            {"chain", {{"source", "xi"}, {"levels", 3}, {"d", 1.0}, {"xi0_inv", 0.8}}}};
  }
  bad("unknown preset '" + name + "'");
}

RunConfig parse_config(const json& input) {
  check_keys(input, {"preset", "map", "grid", "constants", "level0", "chain", "params", "out", "emit"}, "config");
  json j = json::object();
  std::string preset;
  if (input.contains("preset")) {
    if (!input["preset"].is_string()) bad("preset must be a string");
    preset = input["preset"].get<std::string>();
    j = preset_json(preset);
  }
  j.merge_patch(input);

  RunConfig cfg;
  cfg.source = j;
  cfg.preset = preset;
  if (!j.contains("map")) bad("config needs a map");
  cfg.map = j["map"];
  parse_map(cfg.map);
  cfg.grid = parse_grid(j.value("grid", json::object()));
  if (j.contains("constants")) {
    if (!j["constants"].is_object()) bad("constants must be an object");
    for (const auto& [k, v] : j["constants"].items()) {
      if (!v.is_number()) bad("constant '" + k + "' must be a number");
      if (k == "x" || k == "exp" || k == "ln") bad("constant name '" + k + "' is reserved");
      cfg.constants[k] = v.get<double>();
    }
  }
  if (j.contains("params")) {
    check_keys(j["params"], {"q", "a", "x0", "b0", "beta_root", "kappa2", "a_coef", "b_coef"}, "params");
    cfg.params = j["params"];
  }
  if (j.contains("level0")) cfg.level0 = parse_level0(j["level0"]);
  cfg.chain = parse_chain(j.value("chain", json::object()));
  if (cfg.chain.source == ChainSpec::Source::Preset && preset.empty()) bad("chain.source preset needs a preset");
  if (j.contains("out")) {
    if (!j["out"].is_string()) bad("out must be a string");
    cfg.out = j["out"].get<std::string>();
  }
  if (j.contains("emit")) {
    if (!j["emit"].is_array()) bad("emit must be an array");
    cfg.emit.clear();
    for (const auto& e : j["emit"]) {
      if (!e.is_string() || (e != "csv" && e != "json")) bad("emit entries must be csv or json");
      cfg.emit.push_back(e.get<std::string>());
    }
  }
  if (cfg.level0) {
    const auto& l = *cfg.level0;
    for (const auto* s : {&l.B, &l.eta, &l.h, &l.f, &l.alpha, &l.beta, &l.gamma, &l.h0}) {
      if (!s->empty()) Expr::parse(*s, cfg.constants);
    }
  }
  Expr::parse(cfg.chain.g, cfg.constants);
  Expr::parse(cfg.chain.h, cfg.constants);
  return cfg;
}

void set_depth(RunConfig& cfg, int depth) {
  if (depth < 1) bad("depth must be positive");
  cfg.grid.max_depth = depth;
  cfg.grid.max_iter = std::max(cfg.grid.max_iter, 2 * depth);
}

GridPtr build_config_grid(const RunConfig& cfg) {
  return std::make_shared<const OrbitGrid>(build_grid(parse_map(cfg.map), cfg.grid));
}

namespace {

ChainRun preset_chain(const RunConfig& cfg) {
  ChainRun run;
  const int K = cfg.chain.levels;
  if (cfg.preset == "qhahn") {
    QHahnParams p;
    p.q = param(cfg, "q", 0.5);
    p.depth = cfg.grid.max_depth;
    p.levels = K + 1;
    p.bases = cfg.grid.bases;
    const auto ch = qhahn_chain(p);
    run.grid = ch.grid;
    run.levels = ch.levels;
    for (int k = 0; k <= K; ++k) {
      run.eigenfunctions.push_back(ch.ops(1, k));
      run.eigenvalues.push_back(ch.levels[k].c);
    }
    for (int n = 0; n <= K; ++n) run.lambda_history.push_back(ch.eigenvalue(n));
  } else if (cfg.preset == "constg") {
    ConstGParams p;
    p.q = param(cfg, "q", 0.7);
    p.b0 = param(cfg, "b0", 1.0);
    p.beta_root = param(cfg, "beta_root", 2.0);
    p.kappa2 = param(cfg, "kappa2", 0.3);
    p.depth = cfg.grid.max_depth;
    p.levels = K + 1;
    const auto ch = const_g_scenario(p);
    run.grid = ch.grid;
    run.levels.assign(ch.levels.begin(), ch.levels.begin() + K + 1);
    // Level 0 has no reference eigenfunction; the kernel of A*_0 starts at level 1.
    run.eigenfunctions.push_back(GridFunction());
    run.eigenvalues.push_back(0.0);
    EigenPair pair{ch.kernel_recursive(), -ch.c(0), 1, 0.0};
    double sum = -ch.c(0);
    run.lambda_history.push_back(sum);
    for (int k = 1; k <= K; ++k) {
      if (k > 1) {
        pair = lift(pair, ch.levels[k - 1], ch.levels[k]);
        sum -= ch.c(k - 1);
        run.lambda_history.push_back(sum);
      }
      run.eigenfunctions.push_back(pair.psi);
      run.eigenvalues.push_back(pair.lambda);
    }
  } else if (cfg.preset == "fractional") {
    const double a = param(cfg, "a", 2.0);
    const auto s = fractional_scenario(a, param(cfg, "x0", 0.5), cfg.grid.max_depth,
                                       cfg.grid.mode == OrbitMode::Group);
    run.grid = s.grid;
    for (int k = 0; k <= K; ++k) {
      run.levels.push_back(s.level(k, param(cfg, "a_coef", 1.3), param(cfg, "b_coef", 0.7)));
      run.kernels.push_back(
          GridFunction::sample_real(s.grid, [&s, k](double x) { return s.oracle.psi(x, k); }, "psi"));
      run.lambda_history.push_back(0.0);
    }
  } else {
    bad("preset '" + cfg.preset + "' has no chain");
  }
  return run;
}

// Rows next to a fixed point (a step below 1e-4 on either side) are skipped;
// absolute rounding of the points there is amplified by the pole of phi.
double kernel_residual(const ChainLevel& L, const GridFunction& psi) {
  const auto& g = L.grid();
  const auto r = apply_A(L, psi);
  double worst = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r.valid(i)) continue;
    if (std::abs(g.delta(i)) < 1e-4 || std::abs(g.pre_delta(i)) < 1e-4) continue;
    const double scale = std::abs(L.phi[i] * psi[i]) + std::abs(L.h[i] * psi[i + 1] / g.delta(i));
    if (scale > 0.0) worst = std::max(worst, std::abs(r[i]) / scale);
  }
  return worst;
}

ChainLevel level_zero(const RunConfig& cfg, const GridPtr& g) {
  const auto& l = *cfg.level0;
  if (l.kind == LevelZeroSpec::Kind::Direct) {
    return make_level(0, sample(g, l.B, cfg.constants), sample(g, l.eta, cfg.constants),
                      sample(g, l.h, cfg.constants), sample(g, l.f, cfg.constants));
  }
  CoefficientTriple coef{sample(g, l.alpha, cfg.constants), sample(g, l.beta, cfg.constants),
                         sample(g, l.gamma, cfg.constants), l.lambda};
  return from_coefficients(coef, sample(g, l.h0, cfg.constants), *l.seed);
}

ChainRun explicit_chain(const RunConfig& cfg) {
  if (!cfg.level0) throw Error(ErrorKind::ConfigError, "chain needs a level0 entry");
  ChainRun run;
  run.grid = build_config_grid(cfg);
  run.levels.push_back(level_zero(cfg, run.grid));
  const auto& spec = cfg.chain;
  for (int k = 0; k < spec.levels; ++k) {
    auto& L = run.levels.back();
    GridFunction g, h_next;
    if (spec.source == ChainSpec::Source::Xi) {
      g = particular_gauge_xi(L, spec.d, spec.xi0_inv).g;
      h_next = GridFunction::constant(run.grid, 1.0, "h");
      L.c = 0.0;
    } else {
      g = sample(run.grid, spec.g, cfg.constants);
      h_next = sample(run.grid, spec.h, cfg.constants);
      L.c = spec.c;
    }
    L.g = g;
    L.d = spec.d;
    run.levels.push_back(advance_level(L, g, h_next, spec.d));
  }
  for (std::size_t k = 0; k < run.levels.size(); ++k) {
    run.eigenfunctions.push_back(GridFunction());
    run.eigenvalues.push_back(0.0);
  }
  double sum = 0.0;
  for (const auto& L : run.levels) {
    run.lambda_history.push_back(sum);
    sum += L.c.real();
  }
  return run;
}

}  // namespace

ChainRun run_chain(const RunConfig& cfg) {
  ChainRun run = cfg.chain.source == ChainSpec::Source::Preset ? preset_chain(cfg) : explicit_chain(cfg);
  const bool chained = cfg.preset != "fractional";
  for (std::size_t k = 0; k < run.levels.size(); ++k) {
    const auto& L = run.levels[k];
    ResidualRow row;
    row.k = static_cast<int>(k);
    const auto pr = pearson_residual(PearsonTriple::from(L.B, L.eta), L.w);
    row.pearson = std::max(pr.derivative_form, pr.shift_form);
    if (chained && k + 1 < run.levels.size()) {
      const auto& N = run.levels[k + 1];
      row.chain = chain_equation_residual(L, N.h, L.g, L.c, L.d);
      row.factorization = factorization_residual(L, N, 4).residual;
    }
    if (k < run.eigenfunctions.size() && run.eigenfunctions[k].grid_ptr()) {
      row.eigen = eigen_residual(L, run.eigenfunctions[k], run.eigenvalues[k]);
    }
    if (k < run.kernels.size()) row.kernel = kernel_residual(L, run.kernels[k]);
    run.residuals.push_back(row);
  }
  return run;
}

std::string first_failure(const ChainRun& run, const ResidualThresholds& t) {
  for (const auto& r : run.residuals) {
    const std::string at = " at level " + std::to_string(r.k);
    if (!(r.pearson <= t.pearson)) return "pearson" + at;
    if (r.chain >= 0 && !(r.chain <= t.chain)) return "chain" + at;
    if (r.factorization >= 0 && !(r.factorization <= t.factorization)) return "factorization" + at;
    if (r.eigen >= 0 && !(r.eigen <= t.eigen)) return "eigen" + at;
    if (r.kernel >= 0 && !(r.kernel <= t.kernel)) return "kernel" + at;
    if (std::isnan(r.chain) || std::isnan(r.factorization) || std::isnan(r.eigen)) return "nan residual" + at;
  }
  return {};
}

json chain_manifest(const RunConfig& cfg, const ChainRun& run) {
  json levels = json::array();
  for (std::size_t k = 0; k < run.levels.size(); ++k) {
    const auto& L = run.levels[k];
    const auto& r = run.residuals[k];
    json row = {{"k", L.k},
                {"c", {L.c.real(), L.c.imag()}},
                {"d", {L.d.real(), L.d.imag()}},
                {"residuals", {{"pearson", r.pearson}}}};
    if (r.chain >= 0) row["residuals"]["chain"] = r.chain;
    if (r.factorization >= 0) row["residuals"]["comm"] = r.factorization;
    if (r.eigen >= 0) row["residuals"]["eigen"] = r.eigen;
    if (r.kernel >= 0) row["residuals"]["kernel"] = r.kernel;
    levels.push_back(row);
  }
  return {{"preset", cfg.preset},
          {"map", cfg.map},
          {"grid_points", run.grid->size()},
          {"levels", levels},
          {"lambda_history", run.lambda_history}};
}

}  // namespace tau
