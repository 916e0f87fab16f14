#include <cmath>
#include <memory>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "tau/error.hpp"
#include "tau/riccati.hpp"

using namespace tau;

namespace {

GridPtr halving_grid(double x0 = 0.5, int depth = 512) {
  GridSpec s;
  s.bases = {x0};
  s.max_depth = depth;
  return std::make_shared<const OrbitGrid>(build_grid(TauMap::linear(0.5), s));
}

// LambdaTilde with entries continuous at 0, so the resolvent converges on x/2.
TwoByTwoSystem smooth_system(const GridPtr& g, double c_scale = 1.0) {
  TwoByTwoSystem s{GridFunction::sample_real(g, [](double x) { return 0.3 + x; }),
                   GridFunction::sample_real(g, [](double x) { return 0.5 - 0.2 * x; }),
                   GridFunction::sample_real(g, [c_scale](double x) { return c_scale * (0.4 + x * x); }),
                   GridFunction::sample_real(g, [](double x) { return -0.2 + 0.7 * x; }), SystemForm::LambdaTilde};
  return s.to_lambda();
}

double max_diff(const Mat2& a, const Mat2& b) { return (a - b).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("Lambda and LambdaTilde forms convert both ways") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto back = s.to_tilde().to_lambda();
  for (std::size_t i = 0; i < g->size(); ++i) CHECK(max_diff(back.at(i), s.at(i)) <= 1e-14 * std::max(1.0, s.at(i).cwiseAbs().maxCoeff()));
}

TEST_CASE("second-order coefficients give the companion system") {
  const auto g = halving_grid(0.5, 20);
  CoefficientTriple c{GridFunction::constant(g, 1.0), GridFunction::constant(g, 0.0), GridFunction::constant(g, -1.0), 0.0};
  const auto s = system_from_second_order(c);
  Mat2 expect;
  expect << 0.0, 1.0, 1.0, 0.0;
  CHECK(max_diff(s.at(3), expect) == 0.0);
  CoefficientTriple degenerate{GridFunction::constant(g, 1.0), GridFunction::constant(g, 0.7), GridFunction::constant(g, 0.0), 0.7};
  CHECK_THROWS_AS(system_from_second_order(degenerate), Error);
  CoefficientTriple zero_alpha{GridFunction::constant(g, 0.0), GridFunction::constant(g, 1.0), GridFunction::constant(g, 1.0), 0.0};
  CHECK_THROWS_AS(system_from_second_order(zero_alpha), Error);
}

TEST_CASE("solutions of the companion system solve the three-term equation") {
  const auto g = halving_grid(0.5, 24);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  for (int trial = 0; trial < 5; ++trial) {
    const double p0 = u(rng), p1 = u(rng), p2 = u(rng), lam = u(rng);
    CoefficientTriple c{GridFunction::sample_real(g, [&](double x) { return p0 + x; }),
                        GridFunction::sample_real(g, [&](double x) { return -p1 * (1.0 + x * x); }),
                        GridFunction::sample_real(g, [&](double x) { return p2 - 0.3 * x; }), lam};
    const auto s = system_from_second_order(c);
    const auto [psi, phi] = solve_system(s, Vec2(1.0, 0.3));
    for (std::size_t i = 1; i + 1 < g->size(); ++i) {
      CHECK(std::abs(phi[i + 1] - psi[i]) <= 1e-12 * std::abs(psi[i]));
      const cplx r = c.alpha[i] * psi[i + 1] + (c.beta[i] - lam) * psi[i] + c.gamma[i] * psi[i - 1];
      const double scale = std::abs(c.alpha[i] * psi[i + 1]) + std::abs((c.beta[i] - lam) * psi[i]) + std::abs(c.gamma[i] * psi[i - 1]);
      CHECK(std::abs(r) <= 1e-9 * scale);
    }
  }
}

TEST_CASE("identity and diagonal resolvents") {
  const auto g = halving_grid();
  const auto one = GridFunction::constant(g, 1.0);
  const auto zero = GridFunction::constant(g, 0.0);
  const TwoByTwoSystem id{one, zero, zero, one};
  const auto r = resolvent(id, 0);
  CHECK(max_diff(r.matrix, Mat2::Identity()) == 0.0);
  CHECK(r.converged);
  const auto [psi, phi] = solve_system(id, Vec2(2.0, -3.0));
  for (std::size_t i = 0; i < g->size(); ++i) {
    CHECK(psi[i] == cplx(2.0));
    CHECK(phi[i] == cplx(-3.0));
  }
  const auto a = GridFunction::sample_real(g, [](double x) { return 1.0 + 0.5 * x; });
  const auto d = GridFunction::sample_real(g, [](double x) { return 1.0 / (1.0 + x * x); });
  const TwoByTwoSystem diag{a, zero, zero, d};
  const auto rd = resolvent(diag, 0);
  double pa = 1.0, pd = 1.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    pa *= a[i].real();
    pd *= d[i].real();
  }
  CHECK(std::abs(rd.matrix(0, 0) - pa) < 1e-14 * pa);
  CHECK(std::abs(rd.matrix(1, 1) - pd) < 1e-14 * pd);
  CHECK(std::abs(rd.matrix(0, 1)) == 0.0);
  const auto pi = product_integral(a, 0);
  CHECK(std::abs(rd.matrix(0, 0) - pi.value) < 1e-12 * pa);
}

TEST_CASE("a continuous LambdaTilde on a contracting map has a convergent resolvent") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto r = resolvent(s, 0);
  CHECK(r.converged);
  CHECK(std::isfinite(r.criterion_sum));
  CHECK(r.cauchy_gap < 1e-12);
  // Bound from the convergence proof: ||P|| <= prod (1 + |Delta| ||LambdaTilde||).
  CHECK(r.matrix.cwiseAbs().maxCoeff() <= 2.0 * std::exp(r.criterion_sum));
}

TEST_CASE("resolvent field obeys the step identity") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto field = resolvent_field(s);
  for (std::size_t i = 0; i + 1 < g->size(); ++i) {
    const Mat2 rhs = field[i + 1] * s.at(i);
    CHECK(max_diff(field[i], rhs) <= 1e-10 * field[i].cwiseAbs().maxCoeff());
  }
  CHECK(max_diff(field[0], resolvent(s, 0).matrix) <= 1e-13 * field[0].cwiseAbs().maxCoeff());
}

TEST_CASE("solve_system returns the resolvent solution") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto [psi, phi] = solve_system(s, Vec2(1.0, 0.4));
  CHECK(system_residual(s, psi, phi) < 1e-12);
  // Near the limit the solution approaches the boundary value.
  const auto last = g->size() - 1;
  CHECK(std::abs(psi[last] - 1.0) < 1e-12);
  CHECK(std::abs(phi[last] - 0.4) < 1e-12);
}

TEST_CASE("triangular closed form matches the brute-force product") {
  const auto g = halving_grid();
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    const double c1 = u(rng), c2 = u(rng), c3 = u(rng);
    auto s = smooth_system(g, 0.0);
    s.a = GridFunction::sample_real(g, [&](double x) { return std::exp(c1 * x); });
    s.d = GridFunction::sample_real(g, [&](double x) { return 1.0 + 0.5 * c2 * x; });
    s.b = GridFunction::sample_real(g, [&](double x) { return c3 * x; });
    for (std::size_t start : {std::size_t{0}, std::size_t{3}}) {
      const auto closed = triangular_resolvent(s, start);
      const auto brute = resolvent(s, start);
      CHECK(max_diff(closed.matrix, brute.matrix) < 1e-9);
    }
  }
  auto s = smooth_system(g, 0.0);
  s.b = GridFunction::constant(g, 0.0);
  CHECK(std::abs(triangular_resolvent(s, 0).matrix(0, 1)) == 0.0);
  s = smooth_system(g, 0.0);
  s.d = s.a;
  const auto closed = triangular_resolvent(s, 0);
  cplx sum = 0.0;
  cplx ainf = 1.0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    sum += s.b[i] / s.a[i];
    ainf *= s.a[i];
  }
  CHECK(std::abs(closed.matrix(0, 1) - ainf * sum) < 1e-12 * std::abs(ainf * sum));
  CHECK_THROWS_AS(triangular_resolvent(smooth_system(g), 0), Error);
}

TEST_CASE("Darboux gauges") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto same = darboux(s, Gauge::identity(g));
  for (std::size_t i = 0; i + 1 < g->size(); ++i) CHECK(max_diff(same.at(i), s.at(i)) == 0.0);

  // A particular Riccati solution makes the gauged system upper triangular.
  const auto u0 = forward_ratio(s, Vec2(1.0, 0.2));
  const auto tri = darboux(s, Gauge::lower_unipotent(u0));
  for (std::size_t i = 0; i + 1 < g->size(); ++i) {
    if (!tri.valid(i)) continue;
    CHECK(std::abs(tri.c[i]) <= 1e-13 * tri.at(i).cwiseAbs().maxCoeff());
  }

  const auto D1 = Gauge::lower_unipotent(GridFunction::sample_real(g, [](double x) { return 0.3 + x; }));
  Gauge D2{GridFunction::sample_real(g, [](double x) { return 2.0 + x; }), GridFunction::constant(g, 0.5),
           GridFunction::constant(g, 0.0), GridFunction::sample_real(g, [](double x) { return 1.0 + x * x; })};
  const auto twice = darboux(darboux(s, D1), D2);
  const auto once = darboux(s, D1 * D2);
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (!twice.valid(i) || !once.valid(i)) continue;
    CHECK(max_diff(twice.at(i), once.at(i)) <= 1e-12 * once.at(i).cwiseAbs().maxCoeff());
  }
  Gauge singular{GridFunction::constant(g, 1.0), GridFunction::constant(g, 1.0), GridFunction::constant(g, 1.0),
                 GridFunction::constant(g, 1.0)};
  CHECK_THROWS_AS(darboux(s, singular), Error);
}

TEST_CASE("singular Darboux transforms") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto u = forward_ratio(s, Vec2(1.0, 0.5));
  const auto scalar = singular_darboux(s, 1.0, 1.0);
  CHECK(rhom_residual(scalar, u) < 1e-13);
  const auto shifted = singular_darboux(s, 1.0, 0.0);
  const auto xu = identity(g) * u;
  CHECK(rhom_residual(shifted, xu) < 1e-13);

  GridSpec spec;
  spec.bases = {-1.0};
  const auto neg = std::make_shared<const OrbitGrid>(build_grid(TauMap::linear(0.5), spec));
  CHECK_THROWS_AS(singular_darboux(smooth_system(neg), 0.5, 0.0), Error);
  CHECK_NOTHROW(singular_darboux(smooth_system(neg), 1.0, -1.0));
}

TEST_CASE("regularising the xi system leaves a finite LambdaTilde limit") {
  const auto g = halving_grid(1.0);
  auto B = GridFunction::sample_real(g, [](double x) { return 1.0 + x; });
  auto eta = GridFunction::sample_real(g, [](double x) { return 1.0 + 2.0 * x; });
  const auto L = make_level(0, B, eta, GridFunction::constant(g, 1.0), GridFunction::constant(g, 0.0));
  const auto sys = xi_system(L);
  const auto raw = sys.to_tilde();
  const auto reg = singular_darboux(sys, 0.0, -1.0).to_tilde();
  std::size_t last = 0;
  for (std::size_t i = 0; i < g->size(); ++i)
    if (reg.valid(i)) last = i;
  REQUIRE(last > 20);
  // The raw d entry grows like 1 / Delta, the regularised one settles.
  CHECK(std::abs(raw.d[last]) > 1e10);
  for (auto* f : {&reg.a, &reg.b, &reg.c, &reg.d}) {
    CHECK(std::isfinite(std::abs((*f)[last])));
    CHECK(std::abs((*f)[last] - (*f)[last - 1]) <= 1e-6 * std::max(1.0, std::abs((*f)[last])));
  }
  const double q = 0.5;
  CHECK(std::abs(reg.b[last] - (-(q - q * q) / 1.0)) < 1e-9);
}

TEST_CASE("the two Riccati forms agree") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto u = forward_ratio(s, Vec2(1.0, -0.7));
  CHECK(rhom_residual(s, u) < 1e-11);
  CHECK(riccati_residual(s, u) < 1e-11);
  auto bad = u;
  bad[4] += 1e-3;
  CHECK(rhom_residual(s, bad) > 1e-6);
  CHECK(riccati_residual(s, bad) > 1e-6);
}

TEST_CASE("general Riccati solutions from a particular one") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto u0 = forward_ratio(s, Vec2(1.0, 0.2));
  const auto z = general_solution(s, u0, 0.0);
  for (std::size_t i = 0; i < g->size(); ++i)
    if (z.u.valid(i)) CHECK(z.u[i] == u0[i]);
  for (double t : {0.5, -1.0, 2.0}) CHECK(general_solution(s, u0, t).residual < 1e-8);

  for (auto [a, b] : {std::pair{0.3, 0.7}, std::pair{-1.0, 1.0}, std::pair{2.0, -0.5}}) {
    const auto ut = general_solution(s, u0, b);
    const auto lhs = general_solution(s, ut.u, a);
    const auto rhs = general_solution(s, u0, a + b);
    for (std::size_t i = 0; i < g->size(); ++i) {
      if (!lhs.u.valid(i) || !rhs.u.valid(i)) continue;
      CHECK(std::abs(lhs.u[i] - rhs.u[i]) <= 1e-10 * std::max(1.0, std::abs(rhs.u[i])));
    }
  }

  GridFunction u[4] = {general_solution(s, u0, 0.0).u, general_solution(s, u0, 1.0).u, general_solution(s, u0, 2.0).u,
                       general_solution(s, u0, 3.0).u};
  int checked = 0;
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (!u[0].valid(i) || !u[3].valid(i)) continue;
    // Deep in the orbit the four solutions merge and the ratio loses digits.
    if (std::abs(u[1][i] - u[0][i]) < 1e-4 * std::abs(u[0][i])) continue;
    CHECK(std::abs(cross_ratio(u[0][i], u[1][i], u[2][i], u[3][i]) - 0.25) < 1e-10);
    ++checked;
  }
  CHECK(checked > 5);
  auto wrong = u0;
  wrong[3] *= 1.01;
  CHECK_THROWS_AS(general_solution(s, wrong, 1.0), Error);
}

TEST_CASE("particular system solution solves the linear system") {
  const auto g = halving_grid();
  const auto s = smooth_system(g);
  const auto u0 = forward_ratio(s, Vec2(1.0, 0.2));
  const cplx A = 1.5;
  const cplx B = -0.6;
  const auto [psi, phi] = particular_system_solution(s, u0, A, B);
  CHECK(system_residual(s, psi, phi) < 1e-8);
  const auto ut = general_solution(s, u0, (B / A).real());
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (!ut.u.valid(i) || !psi.valid(i)) continue;
    CHECK(std::abs(phi[i] / psi[i] - ut.u[i]) <= 1e-10 * std::max(1.0, std::abs(ut.u[i])));
  }
}

TEST_CASE("cross ratio") {
  CHECK(std::abs(cross_ratio(0.0, 1.0, 2.0, 3.0) - 0.25) < 1e-15);
  CHECK(cross_ratio(2.0, 2.0, 5.0, -1.0) == cplx(0.0));
  CHECK_THROWS_AS(cross_ratio(1.0, 2.0, 1.0, 3.0), Error);
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int t = 0; t < 20; ++t) {
    cplx v[4];
    for (auto& x : v) x = cplx(u(rng), u(rng));
    const cplx ma(u(rng), u(rng)), mb(u(rng), u(rng)), mc(u(rng), u(rng)), md(u(rng), u(rng));
    auto m = [&](cplx z) { return (ma * z + mb) / (mc * z + md); };
    const cplx r0 = cross_ratio(v[0], v[1], v[2], v[3]);
    const cplx r1 = cross_ratio(m(v[0]), m(v[1]), m(v[2]), m(v[3]));
    CHECK(std::abs(r0 - r1) < 1e-12 * std::max(1.0, std::abs(r0)));
  }
}
