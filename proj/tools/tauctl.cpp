#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "criteria.hpp"
#include "json.hpp"
#include "tau/config.hpp"
#include "tau/error.hpp"
#include "tau/io.hpp"

namespace {

enum Exit { Pass = 0, ValidationFailed = 1, ConfigFailed = 2, NumericalFailed = 3 };

struct Common {
  std::string config;
  std::string out;
  std::string preset;
  std::optional<int> depth;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "JSON config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", c.out, "output directory (overrides the config)");
  cmd->add_option("--preset", c.preset, "named preset: qhahn, constg, fractional, xi");
  cmd->add_option("--depth", c.depth, "orbit depth (overrides grid and preset depth)")->check(CLI::PositiveNumber);
}

tau::RunConfig load(const Common& c) {
  nlohmann::json j = nlohmann::json::object();
  if (!c.config.empty()) {
    std::ifstream in(c.config);
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw tau::Error(tau::ErrorKind::ConfigError, c.config + ": " + e.what());
    }
    if (!j.is_object()) throw tau::Error(tau::ErrorKind::ConfigError, "config must be a JSON object");
  }
  if (!c.preset.empty()) j["preset"] = c.preset;
  if (j.empty()) throw tau::Error(tau::ErrorKind::ConfigError, "give --config or --preset");
  auto cfg = tau::parse_config(j);
  if (c.depth) tau::set_depth(cfg, *c.depth);
  if (!c.out.empty()) cfg.out = c.out;
  return cfg;
}

bool emits(const tau::RunConfig& cfg, const char* kind) {
  return std::find(cfg.emit.begin(), cfg.emit.end(), kind) != cfg.emit.end();
}

template <class Fn>
void write_csv(const std::string& path, Fn&& fn) {
  std::ostringstream os;
  fn(os);
  tau::write_file(path, os.str());
}

bool usable(const tau::GridFunction& f) { return f.grid_ptr() && f.valid_count() > 0; }

int cmd_grid(const Common& c) {
  const auto cfg = load(c);
  const auto grid = tau::build_config_grid(cfg);
  if (emits(cfg, "csv")) write_csv(cfg.out + "/grid.csv", [&](std::ostream& os) { tau::write_grid_csv(os, *grid); });
  const auto diag = tau::grid_diagnostics(*grid);
  if (emits(cfg, "json")) tau::write_file(cfg.out + "/grid.json", diag.dump(2) + "\n");
  std::printf("grid: %zu points in %zu segment(s), written to %s\n", grid->size(), grid->segments().size(),
              cfg.out.c_str());
  return Pass;
}

int cmd_chain(const Common& c) {
  const auto cfg = load(c);
  const auto run = tau::run_chain(cfg);
  if (emits(cfg, "csv")) {
    for (std::size_t k = 0; k < run.levels.size(); ++k) {
      const auto& L = run.levels[k];
      const std::string n = std::to_string(k);
      write_csv(cfg.out + "/level_" + n + ".csv", [&](std::ostream& os) { tau::write_level_csv(os, L); });
      if (usable(L.g)) write_csv(cfg.out + "/g_" + n + ".csv", [&](std::ostream& os) { tau::write_function_csv(os, L.g); });
      if (k < run.eigenfunctions.size() && usable(run.eigenfunctions[k])) {
        write_csv(cfg.out + "/eigen_" + n + ".csv",
                  [&](std::ostream& os) { tau::write_function_csv(os, run.eigenfunctions[k]); });
      }
    }
  }
  if (emits(cfg, "json")) tau::write_file(cfg.out + "/manifest.json", tau::chain_manifest(cfg, run).dump(2) + "\n");
  const auto failure = tau::first_failure(run);
  if (!failure.empty()) {
    std::fprintf(stderr, "chain: residual %s above threshold\n", failure.c_str());
    return NumericalFailed;
  }
  std::printf("chain: %zu levels, all residuals within thresholds, written to %s\n", run.levels.size(),
              cfg.out.c_str());
  return Pass;
}

int cmd_validate(const std::string& criterion, std::optional<double> tol, const std::string& out) {
  accept::Options opt;
  opt.tol = tol;
  const auto results = accept::run(criterion, opt);
  if (results.empty()) throw tau::Error(tau::ErrorKind::ConfigError, "no criterion matches '" + criterion + "'");
  for (const auto& r : results) std::fprintf(stderr, "%s\n", accept::summary_line(r).c_str());
  const auto report = accept::to_json(results);
  if (out.empty()) {
    std::cout << report.dump(2) << '\n';
  } else {
    tau::write_file(out + "/validate.json", report.dump(2) + "\n");
  }
  return report["passed"].get<bool>() ? Pass : ValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orbit grids, factorization chains and the acceptance suite."};
  app.require_subcommand(1);

  Common grid_opts, chain_opts;
  add_common(app.add_subcommand("grid", "write the orbit grid CSV and limit diagnostics"), grid_opts);
  add_common(app.add_subcommand("chain", "build a factorization chain and its residual manifest"), chain_opts);

  auto* validate = app.add_subcommand("validate", "run the acceptance criteria");
  std::string criterion, validate_out;
  std::optional<double> tol;
  validate->add_option("--criterion", criterion, "criterion id or name (default: all)");
  validate->add_option("--tol", tol, "replace every upper-bound tolerance")->check(CLI::PositiveNumber);
  validate->add_option("--out", validate_out, "directory for validate.json (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? Pass : ConfigFailed;
  }

  try {
    if (app.got_subcommand("grid")) return cmd_grid(grid_opts);
    if (app.got_subcommand("chain")) return cmd_chain(chain_opts);
    return cmd_validate(criterion, tol, validate_out);
  } catch (const tau::Error& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return e.kind() == tau::ErrorKind::ConfigError ? ConfigFailed : NumericalFailed;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return NumericalFailed;
  }
}
