#include "tau/riccati.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/LU>

#include "tau/calculus.hpp"
#include "tau/error.hpp"

namespace tau {

namespace {

double max_norm(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

bool positive_real(cplx z) { return z.real() > 0.0 && std::abs(z.imag()) <= 1e-14 * std::abs(z); }

// Valid rows of a segment start at its first valid index and stop at the first hole.
std::pair<std::size_t, std::size_t> valid_run(const TwoByTwoSystem& sys, std::size_t seg, std::size_t from) {
  const auto& g = sys.grid();
  const auto off = g.offset(seg);
  const auto end = off + g.segments()[seg].points.size();
  std::size_t lo = std::max(off, from);
  while (lo < end && !sys.valid(lo)) ++lo;
  std::size_t hi = lo;
  while (hi < end && sys.valid(hi)) ++hi;
  return {lo, hi};
}

GridFunction log_of(const GridFunction& f) {
  return f.map([](cplx z) { return std::log(z); });
}

GridFunction exp_of(const GridFunction& f) {
  return f.map([](cplx z) { return std::exp(z); });
}

void require_positive(const GridFunction& f, const char* what) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (f.valid(i) && !positive_real(f[i])) {
      throw Error(ErrorKind::NonPositiveFactor, std::string(what) + " is not a positive real at x=" +
                                                    std::to_string(f.grid().point(i)));
    }
  }
}

}  // namespace

Mat2 TwoByTwoSystem::at(std::size_t i) const {
  Mat2 m;
  m << a[i], b[i], c[i], d[i];
  return m;
}

TwoByTwoSystem TwoByTwoSystem::to_lambda() const {
  if (form == SystemForm::Lambda) return *this;
  const auto one = GridFunction::constant(grid_ptr(), 1.0);
  const auto dl = deltas(grid_ptr());
  return {one - dl * a, -(dl * b), -(dl * c), one - dl * d, SystemForm::Lambda};
}

TwoByTwoSystem TwoByTwoSystem::to_tilde() const {
  if (form == SystemForm::LambdaTilde) return *this;
  const auto one = GridFunction::constant(grid_ptr(), 1.0);
  const auto dl = deltas(grid_ptr());
  return {(one - a) / dl, -(b / dl), -(c / dl), (one - d) / dl, SystemForm::LambdaTilde};
}

TwoByTwoSystem TwoByTwoSystem::from_matrices(const GridPtr& grid, const std::vector<Mat2>& m, SystemForm form) {
  TwoByTwoSystem s{GridFunction::invalid(grid, "a"), GridFunction::invalid(grid, "b"), GridFunction::invalid(grid, "c"),
                   GridFunction::invalid(grid, "d"), form};
  for (std::size_t i = 0; i < m.size() && i < grid->size(); ++i) {
    if (!m[i].allFinite()) continue;
    s.a.set(i, m[i](0, 0));
    s.b.set(i, m[i](0, 1));
    s.c.set(i, m[i](1, 0));
    s.d.set(i, m[i](1, 1));
  }
  return s;
}

TwoByTwoSystem system_from_second_order(const CoefficientTriple& coef) {
  const auto gp = coef.alpha.grid_ptr();
  const auto n = gp->size();
  TwoByTwoSystem s{GridFunction::invalid(gp, "a"), GridFunction::invalid(gp, "b"), GridFunction::invalid(gp, "c"),
                   GridFunction::invalid(gp, "d"), SystemForm::Lambda};
  for (std::size_t i = 0; i < n; ++i) {
    if (!coef.alpha.valid(i) || !coef.beta.valid(i) || !coef.gamma.valid(i)) continue;
    const cplx al = coef.alpha[i];
    if (al == cplx(0.0)) throw Error(ErrorKind::ZeroAlpha, "alpha vanishes at x=" + std::to_string(gp->point(i)));
    const cplx b = -coef.gamma[i] / al;
    // det Lambda = gamma / alpha.
    if (b == cplx(0.0)) {
      throw Error(ErrorKind::DegenerateSystem, "det Lambda vanishes at x=" + std::to_string(gp->point(i)));
    }
    s.a.set(i, (coef.lambda - coef.beta[i]) / al);
    s.b.set(i, b);
    s.c.set(i, 1.0);
    s.d.set(i, 0.0);
  }
  return s;
}

ResolventResult resolvent(const TwoByTwoSystem& in, std::size_t start) {
  const auto sys = in.to_lambda();
  const auto& g = sys.grid();
  if (start >= g.size()) throw Error(ErrorKind::ConfigError, "resolvent start index outside the grid");
  const auto seg = g.segment_of(start);
  const auto [lo, hi] = valid_run(sys, seg, start);
  if (lo != start) throw Error(ErrorKind::ConfigError, "resolvent start row is not valid");
  ResolventResult r;
  Mat2 P = Mat2::Identity();
  double gaps[3] = {0.0, 0.0, 0.0};
  for (std::size_t i = lo; i < hi; ++i) {
    const Mat2 L = sys.at(i);
    const Mat2 next = L * P;
    const double gap = max_norm(next - P);
    gaps[0] = gaps[1];
    gaps[1] = gaps[2];
    gaps[2] = gap;
    r.criterion_sum += std::abs(g.delta(i)) * max_norm((Mat2::Identity() - L) / g.delta(i));
    P = next;
    ++r.steps;
  }
  r.matrix = P;
  r.cauchy_gap = std::max({gaps[0], gaps[1], gaps[2]});
  r.converged = r.steps >= 3 && std::isfinite(r.criterion_sum) && r.cauchy_gap < 1e-12 * std::max(1.0, max_norm(P));
  return r;
}

std::vector<Mat2> resolvent_field(const TwoByTwoSystem& in) {
  const auto sys = in.to_lambda();
  const auto& g = sys.grid();
  std::vector<Mat2> out(g.size(), Mat2::Constant(cplx(NAN, NAN)));
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto [lo, hi] = valid_run(sys, s, 0);
    Mat2 P = Mat2::Identity();
    for (std::size_t i = hi; i-- > lo;) {
      P = P * sys.at(i);
      out[i] = P;
    }
  }
  return out;
}

double system_residual(const TwoByTwoSystem& in, const GridFunction& psi, const GridFunction& phi) {
  const auto sys = in.to_lambda();
  const auto& g = sys.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !sys.valid(i)) continue;
    if (!psi.valid(i) || !phi.valid(i) || !psi.valid(i + 1) || !phi.valid(i + 1)) continue;
    const Vec2 v(psi[i], phi[i]);
    const Vec2 w(psi[i + 1], phi[i + 1]);
    const Mat2 L = sys.at(i);
    const double scale = (L.cwiseAbs() * v.cwiseAbs()).maxCoeff() + w.cwiseAbs().maxCoeff();
    if (scale > 0.0) worst = std::max(worst, (L * v - w).cwiseAbs().maxCoeff() / scale);
  }
  return worst;
}

std::pair<GridFunction, GridFunction> solve_system(const TwoByTwoSystem& in, Vec2 boundary) {
  const auto sys = in.to_lambda();
  const auto gp = sys.grid_ptr();
  const auto& g = *gp;
  auto psi = GridFunction::invalid(gp, "psi");
  auto phi = GridFunction::invalid(gp, "phi");
  // Lambda_inf(x)^-1 = Lambda(x)^-1 Lambda_inf(tau x)^-1, applied from the tail inward.
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto [lo, hi] = valid_run(sys, s, 0);
    Vec2 v = boundary;
    for (std::size_t i = hi; i-- > lo;) {
      const Mat2 L = sys.at(i);
      const cplx det = L.determinant();
      if (det == cplx(0.0) || !std::isfinite(std::abs(det))) {
        throw Error(ErrorKind::SingularResolvent, "Lambda is singular at x=" + std::to_string(g.point(i)));
      }
      v = L.partialPivLu().solve(v);
      psi.set(i, v(0));
      phi.set(i, v(1));
    }
  }
  const double res = system_residual(sys, psi, phi);
  if (res > 1e-10) throw Error(ErrorKind::VerificationFailed, "solution misses the one-step recursion by " + std::to_string(res));
  return {psi, phi};
}

ResolventResult triangular_resolvent(const TwoByTwoSystem& in, std::size_t start) {
  const auto sys = in.to_lambda();
  const auto& g = sys.grid();
  const auto gp = sys.grid_ptr();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (sys.valid(i) && sys.c[i] != cplx(0.0)) throw Error(ErrorKind::NotTriangular, "c does not vanish on the grid");
  }
  const auto seg = g.segment_of(start);
  const auto [lo, hi] = valid_run(sys, seg, start);
  if (lo != start) throw Error(ErrorKind::ConfigError, "resolvent start row is not valid");
  // Restrict to the rows the brute-force product uses.
  auto a = GridFunction::invalid(gp);
  auto b = GridFunction::invalid(gp);
  auto d = GridFunction::invalid(gp);
  for (std::size_t i = lo; i < hi; ++i) {
    a.set(i, sys.a[i]);
    b.set(i, sys.b[i]);
    d.set(i, sys.d[i]);
  }
  require_positive(a, "a");
  require_positive(d, "d");
  const auto dl = deltas(gp);
  const auto a_inf = exp_of(tau_antiderivative(log_of(a) / dl));
  const auto d_inf = exp_of(tau_antiderivative(log_of(d) / dl));
  const auto ratio = exp_of(tau_antiderivative(log_of(a / d) / dl));
  const auto F = d_inf * tau_antiderivative(b / (dl * a) * ratio);
  ResolventResult r = resolvent(sys, start);
  r.matrix << a_inf[start], F[start], 0.0, d_inf[start];
  return r;
}

Mat2 Gauge::at(std::size_t i) const {
  Mat2 m;
  m << d11[i], d12[i], d21[i], d22[i];
  return m;
}

Gauge Gauge::identity(const GridPtr& grid) {
  return {GridFunction::constant(grid, 1.0), GridFunction::constant(grid, 0.0), GridFunction::constant(grid, 0.0),
          GridFunction::constant(grid, 1.0)};
}

Gauge Gauge::lower_unipotent(const GridFunction& u0) {
  const auto& gp = u0.grid_ptr();
  return {GridFunction::constant(gp, 1.0), GridFunction::constant(gp, 0.0), u0, GridFunction::constant(gp, 1.0)};
}

Gauge Gauge::operator*(const Gauge& o) const {
  return {d11 * o.d11 + d12 * o.d21, d11 * o.d12 + d12 * o.d22, d21 * o.d11 + d22 * o.d21, d21 * o.d12 + d22 * o.d22};
}

namespace {

void check_darboux(const TwoByTwoSystem& sys, const TwoByTwoSystem& out, const Gauge& D) {
  const auto& g = sys.grid();
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto [lo, hi] = valid_run(out, s, 0);
    if (hi - lo < 2) continue;
    // Solutions: D^-1 v solves the transformed system when v solves the original.
    for (int e = 0; e < 2; ++e) {
      Vec2 v = Vec2::Zero();
      v(e) = 1.0;
      for (std::size_t i = lo; i < hi; ++i) {
        const Vec2 w = D.at(i).partialPivLu().solve(v);
        const Vec2 v1 = sys.at(i) * v;
        const Vec2 w1 = D.at(i + 1).partialPivLu().solve(v1);
        const Mat2 L = out.at(i);
        const double scale = (L.cwiseAbs() * w.cwiseAbs()).maxCoeff() + w1.cwiseAbs().maxCoeff();
        if ((L * w - w1).cwiseAbs().maxCoeff() > 1e-9 * scale) {
          throw Error(ErrorKind::VerificationFailed, "gauge-transformed solution misses the new system at x=" +
                                                         std::to_string(g.point(i)));
        }
        v = v1 / std::max(1.0, v1.cwiseAbs().maxCoeff());
      }
    }
    // Resolvent: Lambda'_inf(x) = D(x_end)^-1 Lambda_inf(x) D(x).
    Mat2 P = Mat2::Identity();
    Mat2 Q = Mat2::Identity();
    for (std::size_t i = lo; i < hi; ++i) {
      P = sys.at(i) * P;
      Q = out.at(i) * Q;
    }
    const Mat2 Dend = D.at(hi);
    const Mat2 expect = Dend.partialPivLu().solve(P * D.at(lo));
    const double scale = max_norm(Dend.inverse()) * max_norm(P) * max_norm(D.at(lo));
    if (max_norm(expect - Q) > 1e-9 * scale) {
      throw Error(ErrorKind::VerificationFailed, "gauge-transformed resolvent mismatch");
    }
  }
}

}  // namespace

TwoByTwoSystem darboux(const TwoByTwoSystem& in, const Gauge& D) {
  const auto sys = in.to_lambda();
  const auto& g = sys.grid();
  const auto gp = sys.grid_ptr();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!D.valid(i)) continue;
    const Mat2 m = D.at(i);
    const cplx det = m.determinant();
    if (det == cplx(0.0) || !std::isfinite(std::abs(det))) {
      throw Error(ErrorKind::SingularGauge, "gauge is not invertible at x=" + std::to_string(g.point(i)));
    }
  }
  std::vector<Mat2> m(g.size(), Mat2::Constant(cplx(NAN, NAN)));
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !sys.valid(i) || !D.valid(i) || !D.valid(i + 1)) continue;
    m[i] = D.at(i + 1).partialPivLu().solve(sys.at(i) * D.at(i));
  }
  auto out = TwoByTwoSystem::from_matrices(gp, m);
  check_darboux(sys, out, D);
  return out;
}

Gauge singular_gauge(const GridPtr& grid, double delta1, double delta2) {
  const auto& g = *grid;
  auto p1 = GridFunction::invalid(grid, "D11");
  auto p2 = GridFunction::invalid(grid, "D22");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double base = g.point(i) - g.limit(i);
    for (auto [delta, f] : {std::pair{delta1, &p1}, std::pair{delta2, &p2}}) {
      if (base < 0.0 && delta != std::floor(delta)) {
        throw Error(ErrorKind::NegativeBaseRealExponent, "x - tau_inf < 0 with a non-integer exponent");
      }
      if (base == 0.0 && delta < 0.0) throw Error(ErrorKind::SingularGauge, "grid point sits on the limit");
      f->set(i, std::pow(base, delta));
    }
  }
  return {p1, GridFunction::constant(grid, 0.0), GridFunction::constant(grid, 0.0), p2};
}

TwoByTwoSystem singular_darboux(const TwoByTwoSystem& in, double delta1, double delta2) {
  const auto sys = in.to_lambda();
  const auto gp = sys.grid_ptr();
  const auto D = singular_gauge(gp, delta1, delta2);
  auto out = darboux(sys, D);
  // u' = (x - tau_inf)^(delta1 - delta2) u for a forward solution u.
  const auto u = forward_ratio(sys, Vec2(1.0, 0.5));
  const auto up = D.d11 / D.d22 * u;
  const double res = rhom_residual(out, up);
  if (res > 1e-9) throw Error(ErrorKind::VerificationFailed, "transformed Riccati solution residual " + std::to_string(res));
  return out;
}

double rhom_residual(const TwoByTwoSystem& in, const GridFunction& u) {
  const auto sys = in.to_lambda();
  const auto& g = sys.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !sys.valid(i) || !u.valid(i) || !u.valid(i + 1)) continue;
    const cplx un = u[i];
    const cplx up = u[i + 1];
    const cplx lhs = up * (sys.b[i] * un + sys.a[i]);
    const cplx rhs = sys.d[i] * un + sys.c[i];
    const double scale =
        std::abs(up) * (std::abs(sys.b[i] * un) + std::abs(sys.a[i])) + std::abs(sys.d[i] * un) + std::abs(sys.c[i]);
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

double riccati_residual(const TwoByTwoSystem& in, const GridFunction& u) {
  const auto sys = in.to_tilde();
  const auto& g = sys.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !sys.valid(i) || !u.valid(i) || !u.valid(i + 1)) continue;
    const cplx un = u[i];
    const cplx up = u[i + 1];
    const double dl = g.delta(i);
    const cplx lhs = (un - up) / dl;
    const cplx t1 = sys.c[i];
    const cplx t2 = sys.d[i] * un;
    const cplx t3 = sys.a[i] * up;
    const cplx t4 = sys.b[i] * un * up;
    const double scale = (std::abs(un) + std::abs(up)) / std::abs(dl) + std::abs(t1) + std::abs(t2) + std::abs(t3) +
                         std::abs(t4);
    if (scale > 0.0) worst = std::max(worst, std::abs(lhs - (t1 + t2 - t3 - t4)) / scale);
  }
  return worst;
}

GridFunction forward_ratio(const TwoByTwoSystem& in, Vec2 start) {
  const auto sys = in.to_lambda();
  const auto& g = sys.grid();
  auto u = GridFunction::invalid(sys.grid_ptr(), "u");
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto [lo, hi] = valid_run(sys, s, 0);
    if (lo == hi) continue;
    Vec2 v = start;
    for (std::size_t i = lo;; ++i) {
      if (v(0) != cplx(0.0)) u.set(i, v(1) / v(0));
      if (i == hi || !g.has_next(i)) break;
      v = sys.at(i) * v;
      v /= std::max(1e-300, v.cwiseAbs().maxCoeff());
    }
  }
  return u;
}

namespace {

struct ParticularParts {
  GridFunction p;
  GridFunction r;
  GridFunction E;
  GridFunction S;
};

ParticularParts particular_parts(const TwoByTwoSystem& sys, const GridFunction& u0) {
  const auto gp = sys.grid_ptr();
  const auto& g = *gp;
  const double res = rhom_residual(sys, u0);
  if (res > 1e-10) {
    throw Error(ErrorKind::ParticularNotSolution, "u0 misses the Riccati recursion by " + std::to_string(res));
  }
  ParticularParts pp{GridFunction::invalid(gp, "a + b u0"), GridFunction::invalid(gp, "d - b T u0"), {}, {}};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !sys.valid(i) || !u0.valid(i) || !u0.valid(i + 1)) continue;
    pp.p.set(i, sys.a[i] + sys.b[i] * u0[i]);
    pp.r.set(i, -sys.b[i] * u0[i + 1] + sys.d[i]);
  }
  require_positive(pp.p, "a + b u0");
  require_positive(pp.r, "d - b u0(tau x)");
  const auto dl = deltas(gp);
  pp.E = exp_of(tau_antiderivative(log_of(pp.p / pp.r) / dl));
  pp.S = tau_antiderivative(sys.b / (dl * pp.p) * pp.E);
  return pp;
}

}  // namespace

RiccatiSolution general_solution(const TwoByTwoSystem& in, const GridFunction& u0, double t) {
  const auto sys = in.to_lambda();
  const auto pp = particular_parts(sys, u0);
  RiccatiSolution out{GridFunction::invalid(sys.grid_ptr(), "u^t"), t, u0, 0.0};
  for (std::size_t i = 0; i < u0.size(); ++i) {
    if (!pp.E.valid(i) || !pp.S.valid(i)) continue;
    const cplx den = 1.0 - t * pp.S[i];
    if (std::abs(den) <= 1e-14 * std::max(1.0, std::abs(t * pp.S[i]))) {
      throw Error(ErrorKind::RiccatiBlowup, "u^t has a pole at x=" + std::to_string(u0.grid().point(i)));
    }
    out.u.set(i, u0[i] + t * pp.E[i] / den);
  }
  out.residual = rhom_residual(sys, out.u);
  if (out.residual > 1e-8) {
    throw Error(ErrorKind::VerificationFailed, "u^t misses the Riccati recursion by " + std::to_string(out.residual));
  }
  return out;
}

std::pair<GridFunction, GridFunction> particular_system_solution(const TwoByTwoSystem& in, const GridFunction& u0,
                                                                 cplx A, cplx B) {
  const auto sys = in.to_lambda();
  const auto pp = particular_parts(sys, u0);
  const auto dl = deltas(sys.grid_ptr());
  const auto p_inf = exp_of(tau_antiderivative(log_of(pp.p) / dl));
  const auto r_inf = exp_of(tau_antiderivative(log_of(pp.r) / dl));
  auto psi = (GridFunction::constant(sys.grid_ptr(), A) - B * pp.S) / p_inf;
  auto phi = u0 * psi + B * (GridFunction::constant(sys.grid_ptr(), 1.0) / r_inf);
  psi.set_label("psi");
  phi.set_label("phi");
  return std::make_pair(std::move(psi), std::move(phi));
}

cplx cross_ratio(cplx u1, cplx u2, cplx u3, cplx u4) {
  const cplx den = (u3 - u1) * (u2 - u4);
  if (den == cplx(0.0)) throw Error(ErrorKind::DegenerateQuadruple, "cross ratio denominator vanishes");
  return (u4 - u3) * (u1 - u2) / den;
}

TwoByTwoSystem xi_system(const ChainLevel& L) {
  const auto gp = L.grid_ptr();
  const auto& g = *gp;
  TwoByTwoSystem s{GridFunction::invalid(gp, "a"), GridFunction::invalid(gp, "b"), GridFunction::invalid(gp, "c"),
                   GridFunction::invalid(gp, "d"), SystemForm::Lambda};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !L.B.valid(i + 1) || !L.phi.valid(i + 1) || !L.eta.valid(i + 1)) continue;
    if (L.B[i + 1] == cplx(0.0)) throw Error(ErrorKind::ZeroDivisor, "B vanishes on the orbit");
    const double dd = g.delta(i) * g.delta(i + 1);
    const cplx Q = L.phi[i + 1] * L.phi[i + 1] * L.eta[i + 1];
    s.a.set(i, 1.0);
    s.b.set(i, dd / L.B[i + 1]);
    s.c.set(i, 0.0);
    s.d.set(i, dd * Q / L.B[i + 1]);
  }
  return s;
}

}  // namespace tau
