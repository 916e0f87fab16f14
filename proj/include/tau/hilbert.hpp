#pragma once

#include <cstdint>
#include <vector>

#include "tau/calculus.hpp"
#include "tau/grid_function.hpp"

namespace tau {

/// Orbit grid with a real weight rho. positivity[n] holds when
/// orientation * Delta_n * rho[n] >= 0.
struct WeightedGrid {
  GridFunction rho;
  std::vector<std::uint8_t> positivity;

  const GridPtr& grid_ptr() const { return rho.grid_ptr(); }
  const OrbitGrid& grid() const { return rho.grid(); }
  bool all_positive() const;
};

WeightedGrid make_weighted(GridFunction rho);

/// A_coeff = (B - eta) / Delta.
struct PearsonTriple {
  GridFunction B;
  GridFunction eta;
  GridFunction A_coeff;

  static PearsonTriple from(GridFunction B, GridFunction eta);
};

/// sum orientation * Delta_n * rho[n] * conj(phi[n]) * psi[n].
IntegralResult inner_product(const GridFunction& phi, const GridFunction& psi, const WeightedGrid& w);
double norm(const GridFunction& psi, const WeightedGrid& w);

/// mu[n] = d_tau(tau^-1)(x_n) rho(x_{n-1}) / rho(x_n); invalid at the first
/// index of each segment.
GridFunction shift_mu(const WeightedGrid& w);

/// (T* phi)[n] = mu[n] phi[n-1]; zero at semigroup bases.
GridFunction adjoint_shift(const GridFunction& phi, const WeightedGrid& w);

struct ShiftNorm {
  double value = 0.0;
  bool unbounded = false;
};

/// sqrt(sup |mu|); unbounded when |mu| keeps growing along a truncated tail.
ShiftNorm shift_norm(const WeightedGrid& w);

/// Forward recursion rho(tau x) = eta(x) rho(x) / B(tau x) from each segment start.
WeightedGrid weight_from_pearson(const PearsonTriple& p, double base_value = 1.0);
WeightedGrid weight_from_pearson(const PearsonTriple& p, const std::vector<double>& base_values);

struct PearsonResidual {
  /// max |d_tau(B rho) - A rho| relative to the size of the divided difference.
  double derivative_form = 0.0;
  /// max |T(B rho) - eta rho| / max(1, sup |eta rho|).
  double shift_form = 0.0;
};

PearsonResidual pearson_residual(const PearsonTriple& p, const WeightedGrid& w);

/// mu_k = d_tau(tau^-1) B / T^-1 eta.
GridFunction adjoint_mu_k(const GridFunction& B, const GridFunction& eta);

/// d_tau* = (1 - T*) M_{eta / (id - tau)} with T* taken in the weight w.
GridFunction adjoint_derivative(const GridFunction& psi, const GridFunction& eta, const WeightedGrid& w);

}  // namespace tau
