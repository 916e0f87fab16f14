#include "criteria.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>

namespace accept {

void Recorder::at_most(const std::string& name, double value, double tol) {
  const double bound = opt_.tol ? *opt_.tol : tol;
  metrics_.push_back({name, value, bound, true, value <= bound});
}

void Recorder::at_least(const std::string& name, double value, double bound) {
  metrics_.push_back({name, value, bound, false, value >= bound});
}

void Recorder::holds(const std::string& name, bool ok) {
  metrics_.push_back({name, ok ? 1.0 : 0.0, 1.0, false, ok});
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> all{
      {1, "calculus-suite", calculus_suite},
      {2, "q-oracle", q_oracle},
      {3, "adjoint-suite", adjoint_suite},
      {4, "pearson-suite", pearson_suite},
      {5, "factorization-postulate", factorization_postulate},
      {6, "eigen-chain", eigen_chain},
      {7, "cross-method-spectrum", cross_method},
      {8, "orthogonality", orthogonality},
      {9, "riccati-suite", riccati_suite},
      {10, "darboux-suite", darboux_suite},
      {11, "covariance-suite", covariance_suite},
      {12, "closed-form-oracles", closed_forms},
  };
  return all;
}

std::vector<Result> run(const std::string& filter, const Options& opt) {
  std::vector<Result> out;
  for (const auto& c : criteria()) {
    if (!filter.empty() && filter != c.name && filter != std::to_string(c.id)) continue;
    Result res;
    res.id = c.id;
    res.name = c.name;
    Recorder rec(opt);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(rec);
    } catch (const std::exception& e) {
      res.error = e.what();
    }
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.metrics = rec.metrics();
    res.passed = res.error.empty() && !res.metrics.empty();
    for (const auto& m : res.metrics) res.passed = res.passed && m.passed;
    out.push_back(std::move(res));
  }
  return out;
}

std::string summary_line(const Result& r) {
  char buf[512];
  std::string tail;
  if (!r.error.empty()) {
    tail = "error: " + r.error;
  } else {
    int failed = 0;
    const Metric* first = nullptr;
    for (const auto& m : r.metrics) {
      if (!m.passed) {
        ++failed;
        if (!first) first = &m;
      }
    }
    if (first) {
      std::snprintf(buf, sizeof buf, "%d/%zu checks failed, first %s = %.3g (%s %.3g)", failed, r.metrics.size(),
                    first->name.c_str(), first->value, first->upper ? "<=" : ">=", first->bound);
    } else {
      std::snprintf(buf, sizeof buf, "%zu checks", r.metrics.size());
    }
    tail = buf;
  }
  std::snprintf(buf, sizeof buf, "[%s] %2d %-24s %6.2fs  ", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(),
                r.seconds);
  return buf + tail;
}

nlohmann::json to_json(const std::vector<Result>& results) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& r : results) {
    nlohmann::json ms = nlohmann::json::array();
    for (const auto& m : r.metrics) {
      ms.push_back({{"name", m.name},
                    {"value", std::isfinite(m.value) ? nlohmann::json(m.value) : nlohmann::json(std::to_string(m.value))},
                    {"bound", m.bound},
                    {"kind", m.upper ? "at_most" : "at_least"},
                    {"passed", m.passed}});
    }
    nlohmann::json row = {{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"seconds", r.seconds}, {"metrics", ms}};
    if (!r.error.empty()) row["error"] = r.error;
    arr.push_back(row);
  }
  bool all = true;
  for (const auto& r : results) all = all && r.passed;
  return {{"passed", all}, {"criteria", arr}};
}

}  // namespace accept
