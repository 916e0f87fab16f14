#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "tau/hilbert.hpp"
#include "tau/tridiagonal.hpp"

namespace tau {

/// One level of the factorization chain. g, c, d describe the step to k+1.
struct ChainLevel {
  int k = 0;
  WeightedGrid w;
  GridFunction B;
  GridFunction eta;
  GridFunction h;
  GridFunction f;
  /// phi = f + h / (id - tau).
  GridFunction phi;
  GridFunction g;
  cplx c{0.0};
  cplx d{1.0};

  const GridPtr& grid_ptr() const { return B.grid_ptr(); }
  const OrbitGrid& grid() const { return B.grid(); }
};

/// Builds a level from (B, eta, h, f); rho comes from the Pearson recursion.
ChainLevel make_level(int k, GridFunction B, GridFunction eta, GridFunction h, GridFunction f,
                      double base_value = 1.0);
/// Same with a prescribed weight.
ChainLevel make_level(int k, GridFunction B, GridFunction eta, GridFunction h, GridFunction f, WeightedGrid w);

/// (A psi)[n] = phi[n] psi[n] - (h[n] / Delta_n) psi[n+1].
GridFunction apply_A(const ChainLevel& level, const GridFunction& psi);
/// A* = (1 - T*) M_{h eta / (id - tau)} + M_{eta f}, T* in the weight of the level.
GridFunction apply_Astar(const ChainLevel& level, const GridFunction& psi);

/// Tridiagonal operator on grid functions: lower couples to psi[n-1],
/// upper to psi[n+1]. A missing neighbour contributes nothing.
struct ThreeBand {
  GridFunction lower;
  GridFunction diag;
  GridFunction upper;
};

GridFunction apply_bands(const ThreeBand& m, const GridFunction& psi);

/// Closed form of A A* at level k.
ThreeBand a_astar_bands(const ChainLevel& level);
/// Closed form of A* A at level k.
ThreeBand astar_a_bands(const ChainLevel& level);

/// B' = g B, eta' = T(g eta), rho' = eta rho, phi' = (h / (d h')) T(phi / g).
ChainLevel advance_level(const ChainLevel& level, const GridFunction& g, const GridFunction& h_next, cplx d);

/// Pointwise mismatch of the chain equation relative to the largest term.
double chain_equation_residual(const ChainLevel& level, const GridFunction& h_next, const GridFunction& g, cplx c,
                               cplx d);

struct FactorizationCheck {
  /// max |A_k A_k* psi - (d A*_{k+1} A_{k+1} + c) psi| relative.
  double residual = 0.0;
  /// Operator path against the closed three-band form, both sides.
  double two_path_lhs = 0.0;
  double two_path_rhs = 0.0;
};

FactorizationCheck factorization_residual(const ChainLevel& level, const ChainLevel& next, int probes,
                                          std::uint64_t seed = 1, std::size_t margin = 5);

struct CoefficientTriple {
  GridFunction alpha;
  GridFunction beta;
  GridFunction gamma;
  cplx lambda{0.0};
};

CoefficientTriple to_coefficients(const ChainLevel& level, cplx lambda);
/// alpha psi(tau x) + beta psi + gamma psi(tau^-1 x).
GridFunction apply_coefficients(const CoefficientTriple& coef, const GridFunction& psi);
/// Inverse map; seed is phi_0 / h_0 at the first point of every segment.
ChainLevel from_coefficients(const CoefficientTriple& coef, const GridFunction& h0, cplx seed);

struct EigenPair {
  GridFunction psi;
  cplx lambda{0.0};
  int level = 0;
  double residual = 0.0;
};

/// Rows of A*A psi - lambda psi that carry a meaningful residual.
std::vector<std::uint8_t> residual_rows(const ChainLevel& level);
/// ||A*A psi - lambda psi|| / ||psi|| over residual_rows.
double eigen_residual(const ChainLevel& level, const GridFunction& psi, cplx lambda);

/// <psi, A* A psi> / <psi, psi> over the residual rows.
cplx rayleigh_quotient(const ChainLevel& level, const GridFunction& psi);

EigenPair lift(const EigenPair& pair, const ChainLevel& level, const ChainLevel& next);
EigenPair descend(const EigenPair& pair, const ChainLevel& level);

struct HamiltonianMatrix {
  Tridiagonal matrix;
  /// Grid index of every matrix row.
  std::vector<std::size_t> rows;
};

/// Matrix of A*A - shift over the leading window of each segment where the
/// level data is valid. The last row of a window is a free end: it keeps only
/// the contribution of the last retained A row.
HamiltonianMatrix hamiltonian_matrix(const ChainLevel& level, cplx lambda_shift = 0.0);

struct XiResult {
  GridFunction xi;
  GridFunction g;
  double recursion_residual = 0.0;
};

/// Closed-form particular solution of the xi recursion with c = 0 and
/// integration constant 1 / xi0_inv at the limit.
XiResult particular_gauge_xi(const ChainLevel& level, cplx d, cplx xi0_inv);

/// max |xi_n (Q - xi_{n+1}) - (P - c) xi_{n+1} - c Q| relative to the terms,
/// P = B(tau x) / (Delta(tau x) Delta), Q = phi(tau x)^2 eta(tau x).
double xi_recursion_residual(const ChainLevel& level, const GridFunction& xi, cplx c);

}  // namespace tau
