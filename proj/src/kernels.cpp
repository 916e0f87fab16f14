#include "tau/kernels.hpp"

#include <cmath>
#include <exception>
#include <limits>

#include <omp.h>

namespace tau::kernels {

namespace {
constexpr std::ptrdiff_t kParallelMin = 2048;
}

namespace serial {

cplx weighted_dot(std::span<const cplx> a, std::span<const cplx> b, std::span<const double> w,
                  std::span<const std::uint8_t> mask) {
  cplx s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (mask[i]) s += w[i] * std::conj(a[i]) * b[i];
  return s;
}

void band_apply(const BandView& m, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx v = m.diag[i] * x[i];
    if (i > 0) v += m.lower[i] * x[i - 1];
    if (i + 1 < n) v += m.upper[i] * x[i + 1];
    y[i] = v;
  }
}

int sturm_count(std::span<const double> d, std::span<const double> p, double s) {
  constexpr double tiny = std::numeric_limits<double>::min();
  int count = 0;
  double q = 1.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    q = (d[i] - s) - (i > 0 ? p[i] / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

void for_each(std::size_t count, const std::function<void(std::size_t)>& fn) {
  for (std::size_t i = 0; i < count; ++i) fn(i);
}

}  // namespace serial

namespace parallel {

cplx weighted_dot(std::span<const cplx> a, std::span<const cplx> b, std::span<const double> w,
                  std::span<const std::uint8_t> mask) {
  const auto n = static_cast<std::ptrdiff_t>(a.size());
  double re = 0.0;
  double im = 0.0;
#pragma omp parallel for reduction(+ : re, im) if (n >= kParallelMin) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    if (!mask[i]) continue;
    const cplx t = w[i] * std::conj(a[i]) * b[i];
    re += t.real();
    im += t.imag();
  }
  return {re, im};
}

void band_apply(const BandView& m, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::ptrdiff_t>(x.size());
#pragma omp parallel for if (n >= kParallelMin) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    cplx v = m.diag[i] * x[i];
    if (i > 0) v += m.lower[i] * x[i - 1];
    if (i + 1 < n) v += m.upper[i] * x[i + 1];
    y[i] = v;
  }
}

void for_each(std::size_t count, const std::function<void(std::size_t)>& fn) {
  const auto n = static_cast<std::ptrdiff_t>(count);
  std::exception_ptr first;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      fn(static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical(tau_for_each_error)
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
}

}  // namespace parallel

int max_threads() { return omp_get_max_threads(); }

}  // namespace tau::kernels
