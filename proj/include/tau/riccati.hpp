#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "tau/chain.hpp"
#include "tau/grid_function.hpp"

namespace tau {

using Mat2 = Eigen::Matrix2cd;
using Vec2 = Eigen::Vector2cd;

enum class SystemForm { Lambda, LambdaTilde };

/// (T psi, T phi) = Lambda (psi, phi), or (d psi, d phi) = LambdaTilde (psi, phi);
/// Lambda = I - Delta LambdaTilde.
struct TwoByTwoSystem {
  GridFunction a;
  GridFunction b;
  GridFunction c;
  GridFunction d;
  SystemForm form = SystemForm::Lambda;

  const GridPtr& grid_ptr() const { return a.grid_ptr(); }
  const OrbitGrid& grid() const { return a.grid(); }
  bool valid(std::size_t i) const { return a.valid(i) && b.valid(i) && c.valid(i) && d.valid(i); }
  Mat2 at(std::size_t i) const;
  TwoByTwoSystem to_lambda() const;
  TwoByTwoSystem to_tilde() const;

  static TwoByTwoSystem from_matrices(const GridPtr& grid, const std::vector<Mat2>& m,
                                      SystemForm form = SystemForm::Lambda);
};

/// Lambda = [[(lambda - beta) / alpha, -gamma / alpha], [1, 0]].
TwoByTwoSystem system_from_second_order(const CoefficientTriple& coef);

struct ResolventResult {
  Mat2 matrix = Mat2::Identity();
  bool converged = false;
  /// sum |Delta_n| ||LambdaTilde(x_n)||_max over the orbit.
  double criterion_sum = 0.0;
  /// Largest max-norm gap among the last three partial products.
  double cauchy_gap = 0.0;
  int steps = 0;
};

/// Lambda(x_{N-1}) ... Lambda(x_start) along the segment containing start.
ResolventResult resolvent(const TwoByTwoSystem& sys, std::size_t start);

/// Lambda_inf at every point via Lambda_inf(x) = Lambda_inf(tau x) Lambda(x),
/// with the identity past the last valid row of each segment.
std::vector<Mat2> resolvent_field(const TwoByTwoSystem& sys);

/// (psi, phi)(x) = Lambda_inf(x)^-1 boundary; checked against the one-step recursion.
std::pair<GridFunction, GridFunction> solve_system(const TwoByTwoSystem& sys, Vec2 boundary);

/// Closed form for c = 0 with positive a and d.
ResolventResult triangular_resolvent(const TwoByTwoSystem& sys, std::size_t start);

/// Matrix-valued gauge sampled on the grid.
struct Gauge {
  GridFunction d11;
  GridFunction d12;
  GridFunction d21;
  GridFunction d22;

  Mat2 at(std::size_t i) const;
  bool valid(std::size_t i) const { return d11.valid(i) && d12.valid(i) && d21.valid(i) && d22.valid(i); }
  static Gauge identity(const GridPtr& grid);
  static Gauge lower_unipotent(const GridFunction& u0);
  Gauge operator*(const Gauge& o) const;
};

/// Lambda'(x) = D(tau x)^-1 Lambda(x) D(x). Solution and resolvent covariance
/// are checked on every call.
TwoByTwoSystem darboux(const TwoByTwoSystem& sys, const Gauge& D);

/// D = diag((x - tau_inf)^delta1, (x - tau_inf)^delta2).
Gauge singular_gauge(const GridPtr& grid, double delta1, double delta2);
TwoByTwoSystem singular_darboux(const TwoByTwoSystem& sys, double delta1, double delta2);

/// max |u(tau x)(b u + a) - (d u + c)| over the scale of its terms.
double rhom_residual(const TwoByTwoSystem& sys, const GridFunction& u);
/// max |d_tau u - (c~ + d~ u - a~ u(tau x) - b~ u u(tau x))| over the scale of its terms.
double riccati_residual(const TwoByTwoSystem& sys, const GridFunction& u);

/// u = phi / psi for the forward solution started from (psi, phi) at the first point of each segment.
GridFunction forward_ratio(const TwoByTwoSystem& sys, Vec2 start);

struct RiccatiSolution {
  GridFunction u;
  double t = 0.0;
  GridFunction u0;
  double residual = 0.0;
};

RiccatiSolution general_solution(const TwoByTwoSystem& sys, const GridFunction& u0, double t);

/// (psi, phi) with psi(tau_inf) = A and phi(tau_inf) - u0 psi at tau_inf = B.
std::pair<GridFunction, GridFunction> particular_system_solution(const TwoByTwoSystem& sys, const GridFunction& u0,
                                                                 cplx A, cplx B);

/// max |Lambda(x)(psi, phi)(x) - (psi, phi)(tau x)| relative to the terms.
double system_residual(const TwoByTwoSystem& sys, const GridFunction& psi, const GridFunction& phi);

cplx cross_ratio(cplx u1, cplx u2, cplx u3, cplx u4);

/// Lambda_k of the xi recursion with c = 0:
/// [[1, Delta Delta_1 / B(tau x)], [0, Delta Delta_1 Q / B(tau x)]], Q = phi(tau x)^2 eta(tau x).
TwoByTwoSystem xi_system(const ChainLevel& level);

}  // namespace tau
