#include <cmath>
#include <cstdio>
#include <sstream>

#include "doctest.h"
#include "tau/config.hpp"
#include "tau/error.hpp"
#include "tau/expr.hpp"
#include "tau/io.hpp"

using namespace tau;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error raised");
  return ErrorKind::VerificationFailed;
}

GridPtr halving_grid(int depth) {
  GridSpec s;
  s.bases = {1.0};
  s.max_depth = depth;
  return std::make_shared<const OrbitGrid>(build_grid(TauMap::linear(0.5), s));
}

}  // namespace

TEST_CASE("expression grammar") {
  const Expr::Constants c{{"q", 0.5}, {"pi", M_PI}};
  CHECK(Expr::parse("1 + 2*3")(0.0) == 7.0);
  CHECK(Expr::parse("(1 + 2)*3")(0.0) == 9.0);
  CHECK(Expr::parse("2^3^2")(0.0) == 512.0);
  CHECK(Expr::parse("-2^2")(0.0) == -4.0);
  CHECK(Expr::parse("2^-1")(0.0) == 0.5);
  CHECK(Expr::parse("8/2/2")(0.0) == 2.0);
  CHECK(Expr::parse("x - x^2")(0.25) == 0.1875);
  CHECK(Expr::parse("1.5e2 + .5")(0.0) == 150.5);
  CHECK(Expr::parse("exp(ln(x))", c)(3.0) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(Expr::parse("q*x + pi", c)(2.0) == 1.0 + M_PI);
  CHECK(Expr::parse("1-(1+q)*x", c)(1.0) == -0.5);

  for (const char* badtext : {"", "1 +", "(1", "2x", "sin(x)", "y", "1..2", "exp x", "."}) {
    CHECK_MESSAGE(kind_of([&] { Expr::parse(badtext, c); }) == ErrorKind::ConfigError, badtext);
  }
}

TEST_CASE("number formatting is exact and locale-free") {
  CHECK(fmt17(0.1) == "0.10000000000000001");
  CHECK(fmt17(1.0) == "1");
  CHECK(fmt17(-2.5e-300) == "-2.5e-300");
  char buf[40];
  for (double v : {1.0 / 3.0, 6.02214076e23, -7.1e-12, 0.7}) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    CHECK(fmt17(v) == buf);
  }
  CHECK(fmt17(std::nan("")) == "nan");
  CHECK(fmt17(-HUGE_VAL) == "-inf");
  for (double v : {M_PI, 1e-17, 123456789.123, -0.3}) CHECK(std::stod(fmt17(v)) == v);
}

TEST_CASE("grid function CSV round trip") {
  const auto g = halving_grid(20);
  auto f = GridFunction::sample(g, [](double x) { return cplx(std::sin(x), x * x / 3.0); });
  f.invalidate(3);
  std::stringstream ss;
  write_function_csv(ss, f);
  const auto back = read_function_csv(ss, g);
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(back.valid(i) == f.valid(i));
    CHECK(back[i] == f[i]);
  }

  std::stringstream wrong("n,x,re,im,valid\n0,0.75,1,0,1\n");
  CHECK(kind_of([&] { read_function_csv(wrong, g); }) == ErrorKind::GridMismatch);
  std::stringstream header("n,x,value\n");
  CHECK(kind_of([&] { read_function_csv(header, g); }) == ErrorKind::ConfigError);
}

TEST_CASE("grid CSV has one row per point") {
  const auto g = halving_grid(10);
  std::stringstream ss;
  write_grid_csv(ss, *g);
  std::string line;
  int rows = 0;
  std::getline(ss, line);
  CHECK(line == "n,point,delta");
  while (std::getline(ss, line)) ++rows;
  CHECK(rows == static_cast<int>(g->size()));
  CHECK(rows == 11);
  CHECK(grid_diagnostics(*g)["segments"][0]["limit"] == "0");
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(json::parse(R"({"preset": "qhahn", "grid": {"depth": 30}})"));
  CHECK(cfg.grid.max_depth == 30);
  CHECK(cfg.chain.source == ChainSpec::Source::Preset);
  CHECK(cfg.chain.levels == 5);

  CHECK(kind_of([] { parse_config(json::parse(R"({"preset": "qhahn", "colour": 1})")); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config(json::parse(R"({"preset": "qhahn", "grid": {"deep": 1}})")); }) ==
        ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_config(json::parse(R"({"preset": "nope"})")); }) == ErrorKind::ConfigError);
  // A grid-only config parses; building a chain from it needs level0.
  const auto grid_only = parse_config(json::parse(R"({"map": {"type": "linear", "q": 0.5}})"));
  CHECK(kind_of([&] { run_chain(grid_only); }) == ErrorKind::ConfigError);

  const auto coef = json::parse(R"({"map": {"type": "linear", "q": 0.5},
      "level0": {"alpha": "1", "beta": "-2", "gamma": "1"}})");
  bool cites_seed = false;
  try {
    parse_config(coef);
  } catch (const Error& e) {
    cites_seed = e.kind() == ErrorKind::ConfigError && std::string(e.what()).find("seed") != std::string::npos;
  }
  CHECK(cites_seed);

  const auto badexpr = json::parse(R"({"map": {"type": "linear", "q": 0.5}, "level0": {"B": "1 +", "eta": "1"}})");
  CHECK(kind_of([&] { parse_config(badexpr); }) == ErrorKind::ConfigError);
}

TEST_CASE("maps from config") {
  const auto m = parse_map(json::parse(R"({"type": "compose",
      "outer": {"type": "linear", "q": 2, "h": 1}, "inner": {"type": "power", "p": 2}})"));
  CHECK(m(0.5) == 1.5);
  CHECK(m.inverse(1.5) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(kind_of([] { parse_map(json::parse(R"({"type": "linear"})")); }) == ErrorKind::ConfigError);
  CHECK(kind_of([] { parse_map(json::parse(R"({"type": "spiral"})")); }) == ErrorKind::ConfigError);
}

TEST_CASE("interval grid with coincident orbits fails numerically") {
  auto cfg = parse_config(json::parse(R"({"map": {"type": "linear", "q": 0.5},
      "grid": {"mode": "interval", "bases": [1.0, 0.125]},
      "level0": {"B": "1", "eta": "1"}})"));
  CHECK(kind_of([&] { build_config_grid(cfg); }) == ErrorKind::CoincidentOrbits);
}

TEST_CASE("chain presets meet their residual thresholds") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto cfg = parse_config(json{{"preset", name}});
    const auto run = run_chain(cfg);
    CHECK(run.levels.size() == static_cast<std::size_t>(cfg.chain.levels + 1));
    CHECK(first_failure(run) == "");
    const auto m = chain_manifest(cfg, run);
    CHECK(m["levels"].size() == run.levels.size());
  }
}

TEST_CASE("explicit chain from direct input") {
  // q-Hahn level 0: c_0 = -d_q A_0 = 1 + q.
  auto cfg = parse_config(json::parse(R"J({"map": {"type": "linear", "q": 0.5},
      "grid": {"depth": 30}, "constants": {"q": 0.5},
      "level0": {"B": "x - x^2", "eta": "x - x^2 - (x - q*x)*(1 - (1+q)*x)", "h": "1", "f": "0"},
      "chain": {"source": "explicit", "levels": 3, "g": "1/q", "h": "1", "d": 1, "c": 1.5}})J"));
  const auto run = run_chain(cfg);
  CHECK(run.levels.size() == 4);
  CHECK(run.residuals[0].pearson < 1e-11);
  CHECK(run.residuals[0].chain < 1e-10);

  auto off = cfg;
  off.chain.c = 1.6;
  CHECK(run_chain(off).residuals[0].chain > 1e-4);
}
