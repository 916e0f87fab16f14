#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace tau {

/// Tridiagonal matrix; lower[i] is entry (i, i-1), upper[i] is (i, i+1).
/// lower[0] and upper[n-1] are ignored.
struct Tridiagonal {
  std::vector<std::complex<double>> lower;
  std::vector<std::complex<double>> diag;
  std::vector<std::complex<double>> upper;

  std::size_t size() const noexcept { return diag.size(); }
  std::vector<std::complex<double>> apply(const std::vector<std::complex<double>>& x) const;
  Eigen::MatrixXcd dense() const;
};

/// The `count` smallest eigenvalues, by Sturm-count bisection. Requires a
/// real diagonal and real non-negative products lower[i] * upper[i-1], so the
/// matrix is similar to a real symmetric one.
std::vector<double> smallest_eigenvalues(const Tridiagonal& m, int count);

/// Number of eigenvalues below s (same preconditions).
int eigenvalues_below(const Tridiagonal& m, double s);

}  // namespace tau
