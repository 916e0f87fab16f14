#pragma once

#include <functional>
#include <string>

namespace tau {

using RealFn = std::function<double(double)>;

/// Closed real interval [lo, hi]; either end may be infinite.
struct Interval {
  double lo;
  double hi;

  bool contains(double x, double tol = 0.0) const noexcept {
    return x >= lo - tol && x <= hi + tol;
  }
};

/// The bijection tau of a real subset together with its inverse.
class TauMap {
 public:
  TauMap(RealFn forward, RealFn inverse, Interval domain, std::string name = "custom");

  double operator()(double x) const { return forward_(x); }
  double forward(double x) const { return forward_(x); }
  double inverse(double x) const { return inverse_(x); }

  /// The map tau^-1 with inverse tau.
  TauMap inverted() const { return TauMap(inverse_, forward_, domain_, name_ + "^-1"); }

  const Interval& domain() const noexcept { return domain_; }
  const std::string& name() const noexcept { return name_; }

  /// Largest |tau^-1(tau(x)) - x| / (1 + |x|) over `samples` uniform points
  /// of the domain (clipped to [-clip, clip] for unbounded domains).
  double roundtrip_error(int samples = 101, double clip = 10.0) const;

  /// x -> q x + h on the real line.
  static TauMap linear(double q, double h = 0.0);
  /// x -> a x / ((a - 1) x + 1) on [0, 1].
  static TauMap fractional(double a);
  /// x -> x^p on [0, 1].
  static TauMap power(double p);
  /// outer o inner; the domain is the inner map's.
  static TauMap compose(const TauMap& outer, const TauMap& inner);

 private:
  RealFn forward_;
  RealFn inverse_;
  Interval domain_;
  std::string name_;
};

}  // namespace tau
