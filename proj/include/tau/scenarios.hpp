#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include "tau/chain.hpp"

namespace tau {

/// (alpha; q)_n; n = nullopt is the infinite product, stopped once |q^n alpha| < 1e-17.
cplx qpochhammer(cplx alpha, double q, std::optional<int> n);

/// Real polynomial, coefficients from the constant term up.
struct Poly {
  std::vector<double> c;

  double operator()(double x) const;
  int degree(double tol = 0.0) const;
  Poly scaled(double s) const;
  /// x -> p(s x).
  Poly dilated(double s) const;
  /// (p(x) - p(q x)) / ((1 - q) x).
  Poly q_derivative(double q) const;
  Poly operator+(const Poly& o) const;
};

struct QHahnParams {
  double q = 0.5;
  Poly B0{{0.0, 1.0, -1.0}};
  /// Empty means 1 - (1 + q) x.
  Poly A0{};
  std::vector<double> bases{1.0};
  int depth = 512;
  int levels = 6;
};

/// Chain with h = 1, f = 0, d = 1, g = 1/q. Level k has B_k = q^-k B_0 and
/// A_{k+1}(x) = A_k(q x) + d_q B_{k+1}(x); c_k = -d_q A_k.
struct QHahnChain {
  GridPtr grid;
  std::vector<ChainLevel> levels;
  std::vector<Poly> B;
  std::vector<Poly> A;
  double q = 0.5;

  /// sum_{l < n} c_l, the degree-n eigenvalue at level 0.
  double eigenvalue(int n) const;
  /// A*_0 ... A*_{n-1} 1, a degree-n polynomial on the grid.
  GridFunction ops(int n, int level = 0) const;
};

QHahnChain qhahn_chain(const QHahnParams& p);

struct ConstGParams {
  double q = 0.5;
  double b0 = 1.0;
  /// Positive root of alpha_0; the orbit must stay below it.
  double beta_root = 2.0;
  /// phi_0(x) = kappa1 / x + kappa2 with kappa1 = 1 / (1 - q).
  double kappa2 = 0.3;
  int depth = 512;
  int levels = 6;
};

/// Constant gauge chain: h = 1, d = 1, g = q^-2, B_k = q^-2k B_0 with
/// B_0 = (1 - q)^2 b0, alpha_k = phi_k^2 eta_k = b0 / x^2 + c_k / (1 - q^2),
/// c_k = q^2k c_0 and c_0 = -b0 (1 - q^2) / beta_root^2.
struct ConstGChain {
  GridPtr grid;
  std::vector<ChainLevel> levels;
  ConstGParams params;
  double B0 = 0.0;
  double c0 = 0.0;
  std::function<double(double)> phi0;

  double c(int k) const;
  double alpha(int k, double x) const;
  double phi(int k, double x) const;
  /// Kernel function of A*_0 at level 1, from the one-step recursion.
  GridFunction kernel_recursive() const;
  /// Same function as an infinite product normalised at the limit.
  GridFunction kernel_product() const;
  /// (q x / beta; q)_inf (-q x / beta; q)_inf.
  double pochhammer_profile(double x) const;
};

ConstGChain const_g_scenario(const ConstGParams& p);

/// Closed forms for tau(x) = a x / ((a - 1) x + 1).
struct FractionalOracles {
  double a = 2.0;

  double tau_k(double x, int k) const;
  /// tau^k(x) - tau^(k+1)(x) in product form, free of cancellation near the fixed points.
  double delta_at_iterate(double x, int k) const;
  double dtau_tau(double x) const;
  double dtau_tau_at_iterate(double x, int k) const;
  double fixed_point() const;
  /// Ratio b/a that the alpha recursion needs for a nonzero solution.
  double required_ratio(int lambda) const;
  /// alpha(x) / alpha(fixed point) from the closed forms.
  double alpha(double x, int lambda) const;
  /// Product solution of A_k psi = 0, normalised at the fixed point.
  double psi(double x, int k) const;
  /// D G with D G a^k = 1 (a < 1) or D G = a^k (a > 1).
  double gauge_product(int k) const;
};

struct FractionalScenario {
  FractionalOracles oracle;
  TauMap map;
  GridPtr grid;
  /// Level with h = 1, B = b Delta Delta_-1, phi^2 eta = a_coef, phi = phi0(tau^k x) / (D G).
  ChainLevel level(int k, double a_coef, double b_coef) const;
};

FractionalScenario fractional_scenario(double a, double x0 = 0.5, int depth = 512, bool group = true);

}  // namespace tau
