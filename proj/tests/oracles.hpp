#pragma once
// Independent reference computations used by the tests. Nothing here calls
// into the library.

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

namespace oracle {

inline double halving(double x0, int n) {
  double x = x0;
  for (int i = 0; i < n; ++i) x *= 0.5;
  return x;
}

/// prod_{n=0}^{terms-1} (1 - a q^n).
inline double qpoch_partial(double a, double q, int terms) {
  double p = 1.0;
  double qn = 1.0;
  for (int n = 0; n < terms; ++n) {
    p *= 1.0 - a * qn;
    qn *= q;
  }
  return p;
}

/// Jackson integral of f from 0 to x with ratio q, summed until terms vanish.
template <class F>
double jackson(F f, double x, double q) {
  double s = 0.0;
  double t = x;
  for (int n = 0; n < 4000 && t != 0.0; ++n) {
    s += (t - q * t) * f(t);
    t *= q;
  }
  return s;
}

/// q-derivative (f(x) - f(qx)) / ((1 - q) x).
template <class F>
double qderiv(F f, double x, double q) {
  return (f(x) - f(q * x)) / ((1.0 - q) * x);
}

/// Horner evaluation, coefficients low to high.
inline double poly(const std::vector<double>& c, double x) {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
  return s;
}

inline std::vector<double> random_poly(std::mt19937_64& rng, int degree) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> c(static_cast<std::size_t>(degree) + 1);
  for (auto& v : c) v = u(rng);
  return c;
}

inline double rel(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace oracle

namespace oracle {

/// Rounding scale of the divided difference (f[i] - f[i+1]) / delta.
template <class GF>
double dq_scale(const GF& f, std::size_t i, double delta) {
  return (std::abs(f[i]) + std::abs(f[i + 1])) / std::abs(delta);
}

}  // namespace oracle
