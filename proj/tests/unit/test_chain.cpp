#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include <Eigen/Eigenvalues>

#include "doctest.h"
#include "oracles.hpp"
#include "tau/chain.hpp"
#include "tau/error.hpp"
#include "tau/scenarios.hpp"
#include "tau/tridiagonal.hpp"

using namespace tau;

namespace {

double max_rel(const GridFunction& a, const GridFunction& b) {
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.valid(i) || !b.valid(i)) continue;
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max({scale, std::abs(a[i]), std::abs(b[i])});
  }
  return scale == 0.0 ? diff : diff / scale;
}

std::size_t common_valid(const GridFunction& a, const GridFunction& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a.valid(i) && b.valid(i);
  return n;
}

const QHahnChain& qhahn() {
  static const QHahnChain ch = [] {
    QHahnParams p;
    p.q = 0.5;
    p.levels = 8;
    return qhahn_chain(p);
  }();
  return ch;
}

// Each difference quotient amplifies rounding by 1 / Delta, so pointwise
// eigen identities are checked on an orbit that stops at 2^-12.
const QHahnChain& qhahn_shallow() {
  static const QHahnChain ch = [] {
    QHahnParams p;
    p.q = 0.5;
    p.levels = 8;
    p.depth = 12;
    return qhahn_chain(p);
  }();
  return ch;
}

const ConstGChain& constg() {
  static const ConstGChain ch = [] {
    ConstGParams p;
    p.levels = 5;
    return const_g_scenario(p);
  }();
  return ch;
}

GridFunction probe(const GridPtr& g, std::uint64_t seed, std::size_t margin = 5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto f = GridFunction::constant(g, 0.0);
  for (std::size_t s = 0; s < g->segments().size(); ++s) {
    const auto len = g->segments()[s].points.size();
    for (std::size_t j = margin; j + margin < len; ++j) f[g->offset(s) + j] = cplx(u(rng), u(rng));
  }
  return f;
}

}  // namespace

TEST_CASE("q-Hahn levels factorize with the recurrence constants") {
  const auto& ch = qhahn();
  for (std::size_t k = 0; k + 1 < ch.levels.size(); ++k) {
    const auto r = factorization_residual(ch.levels[k], ch.levels[k + 1], 4);
    CHECK(r.residual < 1e-10);
    CHECK(r.two_path_lhs < 1e-12);
    CHECK(r.two_path_rhs < 1e-12);
  }
}

TEST_CASE("constant gauge levels factorize") {
  const auto& ch = constg();
  for (std::size_t k = 0; k + 1 < ch.levels.size(); ++k) {
    const auto r = factorization_residual(ch.levels[k], ch.levels[k + 1], 4);
    CHECK(r.residual < 1e-10);
    CHECK(r.two_path_lhs < 1e-12);
    CHECK(r.two_path_rhs < 1e-12);
  }
}

TEST_CASE("a wrong chain constant breaks the factorization") {
  auto L = qhahn().levels[0];
  L.c += 1e-3;
  CHECK(factorization_residual(L, qhahn().levels[1], 2).residual > 1e-6);
}

TEST_CASE("advance_level reproduces the polynomial q-Hahn level") {
  const auto& ch = qhahn();
  const auto one = GridFunction::constant(ch.grid, 1.0);
  for (std::size_t k = 0; k + 1 < 4; ++k) {
    const auto& L = ch.levels[k];
    const auto N = advance_level(L, L.g, one, L.d);
    const auto& M = ch.levels[k + 1];
    CHECK(common_valid(N.eta, M.eta) > 20);
    CHECK(max_rel(N.B, M.B) < 1e-14);
    CHECK(max_rel(N.eta, M.eta) < 1e-12);
    CHECK(max_rel(N.phi, M.phi) < 1e-12);
    CHECK(max_rel(N.w.rho, M.w.rho) < 1e-12);
    CHECK(chain_equation_residual(L, one, L.g, L.c, L.d) < 1e-12);
  }
}

TEST_CASE("advance_level rejects weights that violate the Pearson relation") {
  auto L = qhahn().levels[0];
  L.eta = L.eta * 1.01;
  const auto one = GridFunction::constant(L.grid_ptr(), 1.0);
  CHECK_THROWS_AS(advance_level(L, L.g, one, 1.0), Error);
}

TEST_CASE("coefficient form round trip recovers the level") {
  const auto& L = qhahn().levels[1];
  const auto coef = to_coefficients(L, 0.7);
  const auto R = from_coefficients(coef, L.h, L.phi[0] / L.h[0]);
  CHECK(common_valid(R.phi, L.phi) > 20);
  CHECK(max_rel(R.phi, L.phi) < 1e-10);
  CHECK(max_rel(R.eta, L.eta) < 1e-10);
  auto interior = L.B;
  for (std::size_t i = 0; i < interior.size(); ++i)
    if (L.grid().is_base(i)) interior.invalidate(i);
  CHECK(max_rel(R.B, interior) < 1e-10);
}

TEST_CASE("every seed yields a factorization of the same operator") {
  const auto& L = qhahn().levels[0];
  const auto coef = to_coefficients(L, 0.0);
  const auto psi = probe(L.grid_ptr(), 3);
  const auto ref = apply_coefficients(coef, psi);
  for (double seed : {0.5, 2.0, -3.0}) {
    const auto R = from_coefficients(coef, L.h, seed * L.phi[0]);
    const auto back = to_coefficients(R, 0.0);
    const auto rows = residual_rows(L);
    auto a = apply_coefficients(back, psi);
    auto b = ref;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!rows[i]) {
        a.invalidate(i);
        b.invalidate(i);
      }
    }
    CHECK(common_valid(a, b) > 20);
    CHECK(max_rel(a, b) < 1e-9);
  }
}

TEST_CASE("q-Hahn polynomials are eigenfunctions with summed constants") {
  const auto& ch = qhahn_shallow();
  const auto& L = ch.levels[0];
  for (int n = 0; n < 6; ++n) {
    const auto P = ch.ops(n);
    CHECK(eigen_residual(L, P, ch.eigenvalue(n)) < 1e-9);
  }
  const double q = ch.q;
  // c_0 = -d_q A_0 = 1 + q for A_0 = 1 - (1 + q) x.
  CHECK(std::abs(ch.eigenvalue(1) - (1.0 + q)) < 1e-14);
}

TEST_CASE("q-Hahn polynomials of different degree are orthogonal") {
  const auto& ch = qhahn();
  const auto& w = ch.levels[0].w;
  for (int m = 0; m < 5; ++m) {
    for (int n = m + 1; n < 5; ++n) {
      const auto Pm = ch.ops(m);
      const auto Pn = ch.ops(n);
      const double ip = std::abs(inner_product(Pm, Pn, w).value);
      CHECK(ip <= 1e-10 * norm(Pm, w) * norm(Pn, w));
    }
  }
}

TEST_CASE("lift and descend move eigenpairs along the chain") {
  const auto& ch = qhahn_shallow();
  EigenPair p{ch.ops(3), ch.eigenvalue(3), 0, 0.0};
  auto up = lift(p, ch.levels[0], ch.levels[1]);
  CHECK(std::abs(up.lambda - (ch.eigenvalue(3) - ch.levels[0].c)) < 1e-12);
  CHECK(up.residual < 1e-9);
  auto down = descend(up, ch.levels[0]);
  CHECK(std::abs(down.lambda - p.lambda) < 1e-12);
  CHECK(down.residual < 1e-9);
  // A* A psi = lambda psi, so descending the lift returns psi itself.
  CHECK(max_rel(down.psi, p.psi) < 1e-9);
}

TEST_CASE("lifting a kernel element fails") {
  const auto& ch = qhahn();
  EigenPair p{GridFunction::constant(ch.grid, 1.0), 0.0, 0, 0.0};
  CHECK_THROWS_AS(lift(p, ch.levels[0], ch.levels[1]), Error);
}

TEST_CASE("descending to a zero eigenvalue fails") {
  const auto& ch = qhahn();
  auto L = ch.levels[0];
  L.c = 0.0;
  EigenPair p{GridFunction::constant(ch.grid, 1.0), 0.0, 1, 0.0};
  CHECK_THROWS_AS(descend(p, L), Error);
}

TEST_CASE("the Hamiltonian matrix acts like A* A on interior rows") {
  const auto& L = qhahn().levels[2];
  const auto H = hamiltonian_matrix(L);
  const auto psi = probe(L.grid_ptr(), 11, 8);
  std::vector<cplx> x(H.rows.size());
  for (std::size_t r = 0; r < x.size(); ++r) x[r] = psi[H.rows[r]];
  const auto y = H.matrix.apply(x);
  const auto ref = apply_Astar(L, apply_A(L, psi));
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t r = 1; r + 1 < x.size(); ++r) {
    if (!ref.valid(H.rows[r])) continue;
    diff = std::max(diff, std::abs(y[r] - ref[H.rows[r]]));
    scale = std::max(scale, std::abs(ref[H.rows[r]]));
  }
  CHECK(diff <= 1e-12 * scale);
}

TEST_CASE("the Hamiltonian matrix is symmetric in the weighted inner product") {
  const auto& L = qhahn().levels[1];
  const auto H = hamiltonian_matrix(L);
  const auto& g = L.grid();
  for (std::size_t r = 0; r + 1 < H.rows.size(); ++r) {
    const auto i = H.rows[r];
    const auto j = H.rows[r + 1];
    if (j != i + 1) continue;
    const cplx wi = g.delta(i) * L.w.rho[i] * double(g.orientation(i));
    const cplx wj = g.delta(j) * L.w.rho[j] * double(g.orientation(j));
    const cplx a = wi * H.matrix.upper[r];
    const cplx b = wj * H.matrix.lower[r + 1];
    CHECK(std::abs(a - b) <= 1e-12 * std::max(std::abs(a), 1e-300));
  }
}

TEST_CASE("Sturm bisection matches a dense eigensolver") {
  const auto& L = qhahn().levels[0];
  const auto H = hamiltonian_matrix(L);
  const auto ev = smallest_eigenvalues(H.matrix, 5);
  Eigen::MatrixXcd M = H.matrix.dense();
  // Similarity to a symmetric matrix keeps the spectrum real.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M);
  std::vector<double> dense;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) dense.push_back(es.eigenvalues()[i].real());
  std::sort(dense.begin(), dense.end());
  REQUIRE(ev.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(ev[k] - dense[k]) <= 1e-8 * std::max(1.0, std::abs(dense[k])));
}

TEST_CASE("the truncated q-Hahn spectrum starts with the summed constants") {
  const auto& ch = qhahn();
  const auto H = hamiltonian_matrix(ch.levels[0]);
  const auto ev = smallest_eigenvalues(H.matrix, 4);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(ev[n] - ch.eigenvalue(n)) <= 1e-8 * std::max(1.0, ch.eigenvalue(n)));
}

TEST_CASE("the closed-form xi solves the recursion on x/2") {
  auto g = std::make_shared<const OrbitGrid>([] {
    GridSpec s;
    s.bases = {1.0};
    return build_grid(TauMap::linear(0.5), s);
  }());
  const auto dl = deltas(g);
  auto B = GridFunction::sample_real(g, [](double x) { return 1.0 + x; });
  auto eta = GridFunction::sample_real(g, [](double x) { return 1.0 + 2.0 * x; });
  const auto one = GridFunction::constant(g, 1.0);
  const auto L = make_level(0, B, eta, one, GridFunction::constant(g, 0.0));
  const auto xi = particular_gauge_xi(L, 1.0, 0.8);
  CHECK(xi.xi.valid_count() > 20);
  CHECK(xi.recursion_residual < 1e-10);
  CHECK(chain_equation_residual(L, one, xi.g, 0.0, 1.0) < 1e-10);
}

TEST_CASE("the xi route needs eta = B at the limit") {
  auto g = std::make_shared<const OrbitGrid>([] {
    GridSpec s;
    s.bases = {1.0};
    return build_grid(TauMap::linear(0.5), s);
  }());
  auto B = GridFunction::sample_real(g, [](double x) { return 1.0 + x; });
  auto eta = GridFunction::sample_real(g, [](double x) { return 2.0 + x; });
  const auto one = GridFunction::constant(g, 1.0);
  const auto L = make_level(0, B, eta, one, GridFunction::constant(g, 0.0));
  CHECK_THROWS_AS(particular_gauge_xi(L, 1.0, 0.8), Error);
}

TEST_CASE("q-Hahn gauge solves the xi recursion with c = -d_q A") {
  const auto& ch = qhahn();
  const double q = ch.q;
  for (std::size_t k = 0; k < 3; ++k) {
    const auto& L = ch.levels[k];
    const auto A = ch.A[k];
    auto xi = GridFunction::sample_real(ch.grid, [A, q](double x) { return -A(x) / ((1.0 - q) * x); });
    CHECK(xi_recursion_residual(L, xi, L.c) < 1e-12);
    CHECK(xi_recursion_residual(L, xi, L.c + 0.01) > 1e-6);
  }
}
