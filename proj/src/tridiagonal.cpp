#include "tau/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

#include "tau/error.hpp"
#include "tau/kernels.hpp"

namespace tau {

namespace {

struct RealForm {
  std::vector<double> d;
  std::vector<double> p;
};

RealForm real_form(const Tridiagonal& m) {
  const auto n = m.size();
  RealForm r{std::vector<double>(n), std::vector<double>(n, 0.0)};
  for (std::size_t i = 0; i < n; ++i) {
    const auto di = m.diag[i];
    if (std::abs(di.imag()) > 1e-12 * std::max(1.0, std::abs(di))) {
      throw Error(ErrorKind::VerificationFailed, "tridiagonal diagonal is not real");
    }
    r.d[i] = di.real();
    if (i == 0) continue;
    const auto pi = m.lower[i] * m.upper[i - 1];
    if (std::abs(pi.imag()) > 1e-12 * std::max(1.0, std::abs(pi)) || pi.real() < -1e-12 * std::abs(pi)) {
      throw Error(ErrorKind::VerificationFailed, "tridiagonal is not symmetrizable");
    }
    r.p[i] = std::max(0.0, pi.real());
  }
  return r;
}

}  // namespace

std::vector<std::complex<double>> Tridiagonal::apply(const std::vector<std::complex<double>>& x) const {
  std::vector<std::complex<double>> y(x.size());
  kernels::parallel::band_apply({lower, diag, upper}, x, y);
  return y;
}

Eigen::MatrixXcd Tridiagonal::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = diag[static_cast<std::size_t>(i)];
    if (i > 0) m(i, i - 1) = lower[static_cast<std::size_t>(i)];
    if (i + 1 < n) m(i, i + 1) = upper[static_cast<std::size_t>(i)];
  }
  return m;
}

int eigenvalues_below(const Tridiagonal& m, double s) {
  const auto r = real_form(m);
  return kernels::serial::sturm_count(r.d, r.p, s);
}

std::vector<double> smallest_eigenvalues(const Tridiagonal& m, int count) {
  const auto r = real_form(m);
  const auto n = static_cast<int>(r.d.size());
  count = std::min(count, n);
  // Gershgorin bounds of the symmetrized matrix.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < n; ++i) {
    const double left = i > 0 ? std::sqrt(r.p[static_cast<std::size_t>(i)]) : 0.0;
    const double right = i + 1 < n ? std::sqrt(r.p[static_cast<std::size_t>(i) + 1]) : 0.0;
    lo = std::min(lo, r.d[static_cast<std::size_t>(i)] - left - right);
    hi = std::max(hi, r.d[static_cast<std::size_t>(i)] + left + right);
  }
  std::vector<double> out(static_cast<std::size_t>(count));
  kernels::parallel::for_each(static_cast<std::size_t>(count), [&](std::size_t k) {
    double a = lo;
    double b = hi;
    for (int it = 0; it < 4000; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (b - a <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;
      if (kernels::serial::sturm_count(r.d, r.p, mid) > static_cast<int>(k)) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out[k] = 0.5 * (a + b);
  });
  return out;
}

}  // namespace tau
