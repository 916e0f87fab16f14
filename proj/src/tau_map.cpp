#include "tau/tau_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "tau/error.hpp"

namespace tau {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TauMap::TauMap(RealFn forward, RealFn inverse, Interval domain, std::string name)
    : forward_(std::move(forward)),
      inverse_(std::move(inverse)),
      domain_(domain),
      name_(std::move(name)) {}

double TauMap::roundtrip_error(int samples, double clip) const {
  const double lo = std::max(domain_.lo, -clip);
  const double hi = std::min(domain_.hi, clip);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1);
    const double back = inverse_(forward_(x));
    worst = std::max(worst, std::abs(back - x) / (1.0 + std::abs(x)));
  }
  return worst;
}

TauMap TauMap::linear(double q, double h) {
  if (q == 0.0) throw Error(ErrorKind::ConfigError, "linear map needs q != 0");
  return TauMap([q, h](double x) { return q * x + h; },
                [q, h](double y) { return (y - h) / q; }, {-kInf, kInf},
                "linear(q=" + std::to_string(q) + ",h=" + std::to_string(h) + ")");
}

TauMap TauMap::fractional(double a) {
  if (!(a > 0.0) || a == 1.0) throw Error(ErrorKind::ConfigError, "fractional map needs a > 0, a != 1");
  // The inverse is the same family with parameter 1/a.
  const double b = 1.0 / a;
  return TauMap([a](double x) { return a * x / ((a - 1.0) * x + 1.0); },
                [b](double y) { return b * y / ((b - 1.0) * y + 1.0); }, {0.0, 1.0},
                "fractional(a=" + std::to_string(a) + ")");
}

TauMap TauMap::power(double p) {
  if (!(p > 0.0)) throw Error(ErrorKind::ConfigError, "power map needs p > 0");
  return TauMap([p](double x) { return std::pow(x, p); },
                [p](double y) { return std::pow(y, 1.0 / p); }, {0.0, 1.0},
                "power(p=" + std::to_string(p) + ")");
}

TauMap TauMap::compose(const TauMap& outer, const TauMap& inner) {
  return TauMap([outer, inner](double x) { return outer(inner(x)); },
                [outer, inner](double y) { return inner.inverse(outer.inverse(y)); },
                inner.domain(), outer.name() + " o " + inner.name());
}

}  // namespace tau
