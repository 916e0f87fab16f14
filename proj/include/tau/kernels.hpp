#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>

namespace tau::kernels {

using cplx = std::complex<double>;

/// Three bands of a tridiagonal operator; lower[i] couples row i to i-1,
/// upper[i] couples row i to i+1. Missing couplings are zero.
struct BandView {
  std::span<const cplx> lower;
  std::span<const cplx> diag;
  std::span<const cplx> upper;
};

namespace serial {
/// sum_i w[i] conj(a[i]) b[i] over entries with mask[i] != 0.
cplx weighted_dot(std::span<const cplx> a, std::span<const cplx> b, std::span<const double> w,
                  std::span<const std::uint8_t> mask);
/// y = M x.
void band_apply(const BandView& m, std::span<const cplx> x, std::span<cplx> y);
/// Number of eigenvalues below s of the real tridiagonal with diagonal d and
/// off-diagonal products p[i] = upper[i-1] lower[i] (p[0] unused).
int sturm_count(std::span<const double> d, std::span<const double> p, double s);
/// Runs fn(i) for i in [0, count).
void for_each(std::size_t count, const std::function<void(std::size_t)>& fn);
}  // namespace serial

namespace parallel {
cplx weighted_dot(std::span<const cplx> a, std::span<const cplx> b, std::span<const double> w,
                  std::span<const std::uint8_t> mask);
void band_apply(const BandView& m, std::span<const cplx> x, std::span<cplx> y);
/// Same contract as serial::for_each, iterations run concurrently.
void for_each(std::size_t count, const std::function<void(std::size_t)>& fn);
}  // namespace parallel

int max_threads();

}  // namespace tau::kernels
