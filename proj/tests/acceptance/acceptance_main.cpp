#include <cstdio>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "criteria.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Runs the acceptance criteria and prints one line per criterion."};
  std::string filter;
  std::string json_out;
  accept::Options opt;
  double tol = 0.0;
  app.add_option("--criterion", filter, "criterion id or name (default: all)");
  auto* tol_opt = app.add_option("--tol", tol, "replace every upper-bound tolerance")->check(CLI::PositiveNumber);
  app.add_option("--json", json_out, "write per-metric results to this file");
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "print every metric");
  CLI11_PARSE(app, argc, argv);
  if (*tol_opt) opt.tol = tol;

  const auto results = accept::run(filter, opt);
  if (results.empty()) {
    std::fprintf(stderr, "no criterion matches '%s'\n", filter.c_str());
    return 2;
  }
  int failed = 0;
  for (const auto& r : results) {
    std::printf("%s\n", accept::summary_line(r).c_str());
    if (verbose) {
      for (const auto& m : r.metrics) {
        std::printf("    %s %-56s %.3e %s %.1e\n", m.passed ? "ok  " : "FAIL", m.name.c_str(), m.value,
                    m.upper ? "<=" : ">=", m.bound);
      }
    }
    if (!r.passed) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", results.size() - static_cast<std::size_t>(failed), results.size());
  if (!json_out.empty()) std::ofstream(json_out) << accept::to_json(results).dump(2) << '\n';
  return failed == 0 ? 0 : 1;
}
