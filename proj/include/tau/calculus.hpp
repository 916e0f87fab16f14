#pragma once

#include <cstddef>

#include "tau/grid_function.hpp"

namespace tau {

/// Default relative size of the last series increments for convergence.
inline constexpr double kSeriesTol = 1e-15;

struct SeriesStatus {
  bool converged = true;
  /// Largest of the last three increments on any segment.
  double tail_bound = 0.0;
};

struct IntegralResult {
  cplx value{0.0};
  bool converged = true;
  double tail_bound = 0.0;
};

enum class IntegralMode { Orbit, Interval, Group };

/// (shift f)[n] = f[n + steps] inside each segment.
GridFunction shift(const GridFunction& f, long steps);

/// (f[n] - f[n+1]) / Delta_n; the last index of every segment is invalid.
GridFunction tau_derivative(const GridFunction& f);

/// Sum of orientation * Delta_n f[n] over the valid entries.
IntegralResult tau_integral(const GridFunction& f, double tol = kSeriesTol);
/// Same, after checking that the grid mode matches `mode`.
IntegralResult tau_integral(const GridFunction& f, IntegralMode mode, double tol = kSeriesTol);

/// out[n] = sum_{m >= n} Delta_m f[m] per segment. A hole in the valid
/// window invalidates every index before it.
GridFunction tau_antiderivative(const GridFunction& f, SeriesStatus* status = nullptr, double tol = kSeriesTol);

/// out[n] = prod_{m >= n} 1 / (1 - Delta_m). status->converged is false when
/// the grid is not contracting.
GridFunction tau_exponential(const GridPtr& grid, SeriesStatus* status = nullptr);

/// out[n] = prod_{m >= n} F[m] per segment, same hole rule as the antiderivative.
GridFunction tail_product(const GridFunction& F);

struct ProductResult {
  double value = 1.0;
  double via_log = 1.0;
  bool converged = true;
  double tail_bound = 0.0;
};

/// Product of F over one segment, directly and as exp of a tau-integral of
/// ln F / (t - tau t). Requires real F > 0.
ProductResult product_integral(const GridFunction& F, std::size_t segment = 0);

/// psi with d_tau psi = f psi and psi(limit) = init.
GridFunction solve_linear_first_order(const GridFunction& f, cplx init);

}  // namespace tau
