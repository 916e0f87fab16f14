#include "tau/chain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <utility>

#include "tau/error.hpp"
#include "tau/kernels.hpp"

namespace tau {

namespace {

// Largest pointwise mismatch, each point measured against its own rounding scale.
double max_rel_diff(const GridFunction& a, const GridFunction& b, const GridFunction& scale) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.valid(i) || !b.valid(i) || !scale.valid(i)) continue;
    const double s = std::abs(scale[i]);
    if (s > 0.0) worst = std::max(worst, std::abs(a[i] - b[i]) / s);
  }
  return worst;
}

ThreeBand abs_bands(const ThreeBand& m) {
  auto a = [](cplx z) { return cplx(std::abs(z)); };
  return {m.lower.map(a), m.diag.map(a), m.upper.map(a)};
}

bool all_valid(std::initializer_list<std::pair<const GridFunction*, std::size_t>> items) {
  for (const auto& [f, i] : items)
    if (!f->valid(i)) return false;
  return true;
}

GridFunction probe(const GridPtr& g, std::uint64_t seed, std::size_t margin) {
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

ChainLevel make_level(int k, GridFunction B, GridFunction eta, GridFunction h, GridFunction f, WeightedGrid w) {
  ChainLevel L;
  L.k = k;
  L.phi = f + h / deltas(B.grid_ptr());
  L.phi.set_label("phi");
  L.w = std::move(w);
  L.B = std::move(B);
  L.eta = std::move(eta);
  L.h = std::move(h);
  L.f = std::move(f);
  L.g = GridFunction::invalid(L.B.grid_ptr(), "g");
  return L;
}

ChainLevel make_level(int k, GridFunction B, GridFunction eta, GridFunction h, GridFunction f, double base_value) {
  auto w = weight_from_pearson(PearsonTriple::from(B, eta), base_value);
  return make_level(k, std::move(B), std::move(eta), std::move(h), std::move(f), std::move(w));
}

GridFunction apply_A(const ChainLevel& L, const GridFunction& psi) {
  const auto& g = L.grid();
  auto out = GridFunction::invalid(psi.grid_ptr(), "A " + psi.label());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !all_valid({{&L.phi, i}, {&L.h, i}, {&psi, i}, {&psi, i + 1}})) continue;
    out.set(i, L.phi[i] * psi[i] - L.h[i] / g.delta(i) * psi[i + 1]);
  }
  return out;
}

GridFunction apply_Astar(const ChainLevel& L, const GridFunction& psi) {
  const auto u = L.h * L.eta * psi / deltas(psi.grid_ptr());
  auto out = u - adjoint_shift(u, L.w) + L.eta * L.f * psi;
  out.set_label("A* " + psi.label());
  return out;
}

GridFunction apply_bands(const ThreeBand& m, const GridFunction& psi) {
  const auto& g = psi.grid();
  auto out = GridFunction::invalid(psi.grid_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!m.diag.valid(i) || !psi.valid(i)) continue;
    cplx v = m.diag[i] * psi[i];
    if (g.has_prev(i)) {
      if (!m.lower.valid(i) || !psi.valid(i - 1)) continue;
      v += m.lower[i] * psi[i - 1];
    } else if (!m.lower.valid(i)) {
      continue;
    }
    if (!g.has_next(i)) {
      if (!m.upper.valid(i)) {
        continue;
      }
    } else {
      if (!m.upper.valid(i) || !psi.valid(i + 1)) continue;
      v += m.upper[i] * psi[i + 1];
    }
    out.set(i, v);
  }
  return out;
}

ThreeBand a_astar_bands(const ChainLevel& L) {
  const auto& g = L.grid();
  ThreeBand m{GridFunction::invalid(L.grid_ptr()), GridFunction::invalid(L.grid_ptr()),
              GridFunction::invalid(L.grid_ptr())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.delta(i);
    if (g.has_next(i) && all_valid({{&L.h, i}, {&L.phi, i + 1}, {&L.eta, i + 1}, {&L.B, i + 1}, {&L.phi, i}, {&L.eta, i}})) {
      m.upper.set(i, -L.h[i] * L.phi[i + 1] * L.eta[i + 1] / d);
      m.diag.set(i, L.h[i] * L.h[i] * L.B[i + 1] / (g.delta(i + 1) * d) + L.phi[i] * L.phi[i] * L.eta[i]);
    }
    if (g.is_base(i)) {
      m.lower.set(i, 0.0);
    } else if (g.has_prev(i) && all_valid({{&L.phi, i}, {&L.B, i}, {&L.h, i - 1}})) {
      m.lower.set(i, -L.phi[i] * L.B[i] * L.h[i - 1] / d);
    }
  }
  return m;
}

ThreeBand astar_a_bands(const ChainLevel& L) {
  const auto& g = L.grid();
  ThreeBand m{GridFunction::invalid(L.grid_ptr()), GridFunction::invalid(L.grid_ptr()),
              GridFunction::invalid(L.grid_ptr())};
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g.delta(i);
    if (!all_valid({{&L.eta, i}, {&L.phi, i}, {&L.h, i}})) continue;
    const cplx top = L.eta[i] * L.phi[i] * L.phi[i];
    if (g.has_next(i)) m.upper.set(i, -L.eta[i] * L.phi[i] * L.h[i] / d);
    if (g.is_base(i)) {
      m.lower.set(i, 0.0);
      m.diag.set(i, top);
    } else if (g.has_prev(i) && all_valid({{&L.B, i}, {&L.h, i - 1}, {&L.phi, i - 1}})) {
      m.lower.set(i, -L.B[i] * L.h[i - 1] * L.phi[i - 1] / d);
      m.diag.set(i, top + L.B[i] * L.h[i - 1] * L.h[i - 1] / (d * g.pre_delta(i)));
    }
  }
  return m;
}

ChainLevel advance_level(const ChainLevel& L, const GridFunction& g, const GridFunction& h_next, cplx d) {
  if (d == cplx(0.0)) throw Error(ErrorKind::ConfigError, "chain constant d must be nonzero");
  for (std::size_t i = 0; i < g.size(); ++i)
    if (g.valid(i) && g[i] == cplx(0.0)) throw Error(ErrorKind::ZeroDivisor, "g vanishes on the grid");
  auto B = g * L.B;
  auto eta = shift(g * L.eta, 1);
  auto rho = L.eta * L.w.rho;
  const auto rho_b = shift(L.B * L.w.rho, 1);
  double scale = std::max(1.0, rho.sup_abs());
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!rho.valid(i) || !rho_b.valid(i)) continue;
    if (std::abs(rho[i] - rho_b[i]) > 1e-9 * scale) {
      throw Error(ErrorKind::InconsistentWeights,
                  "eta rho and T(B rho) disagree at x=" + std::to_string(L.grid().point(i)));
    }
  }
  auto phi = L.h / (d * h_next) * shift(L.phi / g, 1);
  auto f = phi - h_next / deltas(L.grid_ptr());
  rho.set_label("rho");
  B.set_label("B");
  eta.set_label("eta");
  f.set_label("f");
  return make_level(L.k + 1, std::move(B), std::move(eta), h_next, std::move(f), make_weighted(std::move(rho)));
}

double chain_equation_residual(const ChainLevel& L, const GridFunction& h_next, const GridFunction& gg, cplx c,
                               cplx d) {
  const auto& g = L.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_prev(i) || !g.has_next(i)) continue;
    if (!all_valid({{&gg, i}, {&gg, i + 1}, {&L.B, i}, {&L.B, i + 1}, {&h_next, i - 1}, {&h_next, i}, {&L.phi, i},
                    {&L.phi, i + 1}, {&L.eta, i}, {&L.eta, i + 1}, {&L.h, i}})) {
      continue;
    }
    const double dn = g.delta(i);
    const double dp = g.pre_delta(i);
    const double dx = g.delta(i + 1);
    const cplx hp = h_next[i - 1];
    const cplx hn = L.h[i];
    const cplx t1 = d * gg[i] * L.B[i] * hp * hp / (dn * dp);
    const cplx t2 = L.phi[i] * L.phi[i] * L.eta[i];
    const cplx t3 = L.B[i + 1] * hn * hn / (dx * dn);
    const cplx t4 = L.phi[i + 1] * L.phi[i + 1] * L.eta[i + 1] * hn * hn / (h_next[i] * h_next[i] * d * gg[i + 1]);
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(c) + std::abs(t3) + std::abs(t4);
    if (scale > 0.0) worst = std::max(worst, std::abs((t1 - t2 + c) - (t3 - t4)) / scale);
  }
  return worst;
}

FactorizationCheck factorization_residual(const ChainLevel& L, const ChainLevel& N, int probes, std::uint64_t seed,
                                          std::size_t margin) {
  if (probes < 1) throw Error(ErrorKind::ConfigError, "factorization_residual needs at least one probe");
  const auto lhs_bands = a_astar_bands(L);
  const auto rhs_bands = astar_a_bands(N);
  std::vector<FactorizationCheck> per(static_cast<std::size_t>(probes));
  kernels::parallel::for_each(per.size(), [&](std::size_t p) {
    const auto psi = probe(L.grid_ptr(), seed + p, margin);
    const auto lhs = apply_A(L, apply_Astar(L, psi));
    const auto ata = apply_Astar(N, apply_A(N, psi));
    const auto rhs = L.d * ata + L.c * psi;
    const auto apsi = psi.map([](cplx z) { return cplx(std::abs(z)); });
    const auto lhs_scale = apply_bands(abs_bands(lhs_bands), apsi);
    const auto rhs_scale = apply_bands(abs_bands(rhs_bands), apsi);
    const auto scale = lhs_scale + std::abs(L.d) * rhs_scale + std::abs(L.c) * apsi;
    per[p].residual = max_rel_diff(lhs, rhs, scale);
    per[p].two_path_lhs = max_rel_diff(lhs, apply_bands(lhs_bands, psi), lhs_scale);
    per[p].two_path_rhs = max_rel_diff(ata, apply_bands(rhs_bands, psi), rhs_scale);
  });
  FactorizationCheck out;
  for (const auto& r : per) {
    out.residual = std::max(out.residual, r.residual);
    out.two_path_lhs = std::max(out.two_path_lhs, r.two_path_lhs);
    out.two_path_rhs = std::max(out.two_path_rhs, r.two_path_rhs);
  }
  return out;
}

CoefficientTriple to_coefficients(const ChainLevel& L, cplx lambda) {
  const auto m = astar_a_bands(L);
  CoefficientTriple t{m.upper, m.diag, m.lower, lambda};
  t.alpha.set_label("alpha");
  t.beta.set_label("beta");
  t.gamma.set_label("gamma");
  return t;
}

GridFunction apply_coefficients(const CoefficientTriple& coef, const GridFunction& psi) {
  return apply_bands({coef.gamma, coef.beta, coef.alpha}, psi);
}

ChainLevel from_coefficients(const CoefficientTriple& coef, const GridFunction& h0, cplx seed) {
  const auto gp = coef.alpha.grid_ptr();
  const auto& g = *gp;
  auto r = GridFunction::invalid(gp, "phi/h");
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto off = g.offset(s);
    const auto len = g.segments()[s].points.size();
    r.set(off, seed);
    for (std::size_t j = 0; j + 1 < len; ++j) {
      const auto i = off + j;
      if (!all_valid({{&coef.alpha, i + 1}, {&coef.beta, i + 1}, {&coef.gamma, i + 1}})) break;
      if (coef.alpha[i + 1] == cplx(0.0)) {
        throw Error(ErrorKind::ZeroAlpha, "alpha vanishes at x=" + std::to_string(g.point(i + 1)));
      }
      const cplx den = r[i] * coef.alpha[i + 1] * g.delta(i + 1);
      const cplx num = -coef.gamma[i + 1] / g.delta(i) - r[i] * coef.beta[i + 1];
      const cplx next = num / den;
      if (den == cplx(0.0) || !std::isfinite(next.real()) || !std::isfinite(next.imag())) {
        throw Error(ErrorKind::RiccatiBlowup, "phi recursion hits a zero denominator at x=" + std::to_string(g.point(i)));
      }
      r.set(i + 1, next);
    }
  }
  auto phi = r * h0;
  auto eta = GridFunction::invalid(gp, "eta");
  auto B = GridFunction::invalid(gp, "B");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!all_valid({{&r, i}, {&h0, i}, {&coef.alpha, i}})) continue;
    if (coef.alpha[i] == cplx(0.0)) throw Error(ErrorKind::ZeroAlpha, "alpha vanishes at x=" + std::to_string(g.point(i)));
    if (r[i] == cplx(0.0)) throw Error(ErrorKind::RiccatiBlowup, "phi vanishes at x=" + std::to_string(g.point(i)));
    const double d = g.delta(i);
    eta.set(i, -coef.alpha[i] * d / (r[i] * h0[i] * h0[i]));
    if (g.is_base(i)) {
      B.set(i, 0.0);
    } else if (g.has_prev(i) && all_valid({{&coef.beta, i}, {&h0, i - 1}})) {
      B.set(i, d * g.pre_delta(i) * (coef.beta[i] + d * coef.alpha[i] * r[i]) / (h0[i - 1] * h0[i - 1]));
    }
  }
  auto f = phi - h0 / deltas(gp);
  f.set_label("f");
  return make_level(0, std::move(B), std::move(eta), h0, std::move(f));
}

std::vector<std::uint8_t> residual_rows(const ChainLevel& L) {
  const auto& g = L.grid();
  const double bscale = std::max(1.0, L.B.sup_abs());
  std::vector<std::uint8_t> rows(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i)) continue;
    if (g.is_base(i)) {
      rows[i] = L.B.valid(i) && std::abs(L.B[i]) <= 1e-12 * bscale ? 1 : 0;
    } else {
      rows[i] = g.has_prev(i) ? 1 : 0;
    }
  }
  return rows;
}

double eigen_residual(const ChainLevel& L, const GridFunction& psi, cplx lambda) {
  const auto rows = residual_rows(L);
  const auto hpsi = apply_Astar(L, apply_A(L, psi));
  auto r = GridFunction::invalid(psi.grid_ptr());
  auto p = GridFunction::invalid(psi.grid_ptr());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i] || !hpsi.valid(i) || !psi.valid(i)) continue;
    r.set(i, hpsi[i] - lambda * psi[i]);
    p.set(i, psi[i]);
  }
  const double np = norm(p, L.w);
  if (np == 0.0) throw Error(ErrorKind::VerificationFailed, "eigenfunction vanishes on the residual window");
  return norm(r, L.w) / np;
}

EigenPair lift(const EigenPair& pair, const ChainLevel& L, const ChainLevel& N) {
  if (pair.level != L.k || N.k != L.k + 1) throw Error(ErrorKind::ConfigError, "lift needs consecutive levels");
  auto psi = apply_A(L, pair.psi);
  const double before = norm(pair.psi, L.w);
  const double after = norm(psi, N.w);
  if (after < 1e-13 * before) throw Error(ErrorKind::ZeroLift, "A psi vanishes: psi lies in ker A");
  EigenPair out;
  out.lambda = (pair.lambda - L.c) / L.d;
  out.level = N.k;
  out.residual = eigen_residual(N, psi, out.lambda);
  out.psi = std::move(psi);
  return out;
}

EigenPair descend(const EigenPair& pair, const ChainLevel& L) {
  if (pair.level != L.k + 1) throw Error(ErrorKind::ConfigError, "descend needs the pair one level above");
  const cplx lambda = L.d * pair.lambda + L.c;
  if (std::abs(lambda) <= 1e-14 * std::max(1.0, std::abs(L.c))) {
    throw Error(ErrorKind::ZeroEigenvalue, "lambda_k vanishes");
  }
  EigenPair out;
  out.psi = apply_Astar(L, pair.psi) * (1.0 / lambda);
  out.lambda = lambda;
  out.level = L.k;
  out.residual = eigen_residual(L, out.psi, lambda);
  return out;
}

cplx rayleigh_quotient(const ChainLevel& L, const GridFunction& psi) {
  const auto rows = residual_rows(L);
  const auto hpsi = apply_Astar(L, apply_A(L, psi));
  auto p = GridFunction::invalid(psi.grid_ptr());
  auto h = GridFunction::invalid(psi.grid_ptr());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i] || !hpsi.valid(i) || !psi.valid(i)) continue;
    p.set(i, psi[i]);
    h.set(i, hpsi[i]);
  }
  const cplx den = inner_product(p, p, L.w).value;
  if (den == cplx(0.0)) throw Error(ErrorKind::VerificationFailed, "eigenfunction vanishes on the residual window");
  return inner_product(p, h, L.w).value / den;
}

HamiltonianMatrix hamiltonian_matrix(const ChainLevel& L, cplx lambda_shift) {
  const auto& g = L.grid();
  HamiltonianMatrix H;
  auto& m = H.matrix;
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto off = g.offset(s);
    const auto len = g.segments()[s].points.size();
    // Row i needs the T* part (B, h at i-1) and, unless it is the free end, the A part at i.
    auto tstar_ok = [&](std::size_t i) {
      return !g.has_prev(i) || all_valid({{&L.B, i}, {&L.h, i - 1}, {&L.phi, i - 1}});
    };
    auto a_ok = [&](std::size_t i) { return g.has_next(i) && all_valid({{&L.eta, i}, {&L.phi, i}, {&L.h, i}}); };
    std::size_t end = 0;
    while (end < len && tstar_ok(off + end) && (end == 0 || a_ok(off + end - 1))) ++end;
    if (end < 2) continue;
    const auto first_row = m.size();
    for (std::size_t j = 0; j < end; ++j) {
      const auto i = off + j;
      const double d = g.delta(i);
      cplx lower = 0.0;
      cplx diag = 0.0;
      cplx upper = 0.0;
      if (g.has_prev(i) && j > 0) {
        lower = -L.B[i] * L.h[i - 1] * L.phi[i - 1] / d;
        diag += L.B[i] * L.h[i - 1] * L.h[i - 1] / (d * g.pre_delta(i));
      }
      if (j + 1 < end) {
        diag += L.eta[i] * L.phi[i] * L.phi[i];
        upper = -L.eta[i] * L.phi[i] * L.h[i] / d;
      }
      m.lower.push_back(j == 0 ? cplx(0.0) : lower);
      m.diag.push_back(diag - lambda_shift);
      m.upper.push_back(upper);
      H.rows.push_back(i);
    }
    m.lower[first_row] = 0.0;
  }
  return H;
}

double xi_recursion_residual(const ChainLevel& L, const GridFunction& xi, cplx c) {
  const auto& g = L.grid();
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !all_valid({{&xi, i}, {&xi, i + 1}, {&L.B, i + 1}, {&L.phi, i + 1}, {&L.eta, i + 1}})) continue;
    const cplx P = L.B[i + 1] / (g.delta(i + 1) * g.delta(i));
    const cplx Q = L.phi[i + 1] * L.phi[i + 1] * L.eta[i + 1];
    const cplx xn = xi[i + 1];
    const cplx lhs = xi[i] * (Q - xn);
    const cplx rhs = (P - c) * xn + c * Q;
    const double scale = std::max({1.0, std::abs(xi[i]) * (std::abs(Q) + std::abs(xn)),
                                   (std::abs(P) + std::abs(c)) * std::abs(xn), std::abs(c) * std::abs(Q)});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
  }
  return worst;
}

XiResult particular_gauge_xi(const ChainLevel& L, cplx d, cplx xi0_inv) {
  const auto gp = L.grid_ptr();
  const auto& g = *gp;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (L.h.valid(i) && std::abs(L.h[i] - 1.0) > 1e-14) throw Error(ErrorKind::ConfigError, "the xi route needs h = 1");
  }
  auto logs = GridFunction::invalid(gp, "ln L");
  auto s = GridFunction::invalid(gp, "s");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !all_valid({{&L.B, i + 1}, {&L.phi, i + 1}, {&L.eta, i + 1}})) continue;
    const double lim = g.limit(i);
    const double xn = g.point(i) - lim;
    const double xn1 = g.point(i + 1) - lim;
    const double dn = g.delta(i);
    const double dx = g.delta(i + 1);
    if (L.B[i + 1] == cplx(0.0)) throw Error(ErrorKind::ZeroDivisor, "B vanishes on the orbit");
    const cplx P = L.B[i + 1] / (dx * dn);
    const cplx Q = L.phi[i + 1] * L.phi[i + 1] * L.eta[i + 1];
    const cplx ratio = xn1 / xn * Q / P;
    if (std::abs(ratio.imag()) > 1e-12 * std::abs(ratio) || !(ratio.real() > 0.0)) {
      throw Error(ErrorKind::NonPositiveFactor, "xi product factor is not a positive real");
    }
    logs.set(i, std::log(ratio.real()) / dn);
    s.set(i, dn * dx / (xn * L.B[i + 1]));
  }
  // The product factors must tend to 1 at the limit.
  for (std::size_t seg = 0; seg < g.segments().size(); ++seg) {
    const auto off = g.offset(seg);
    for (std::size_t j = g.segments()[seg].points.size(); j-- > 0;) {
      if (!logs.valid(off + j)) continue;
      if (std::abs(logs[off + j] * g.delta(off + j)) > 1e-6) {
        throw Error(ErrorKind::SingularLimit, "xi product factor does not tend to 1; need eta = B at the limit");
      }
      break;
    }
  }
  const auto E = tau_antiderivative(logs).map([](cplx z) { return std::exp(z); });
  const auto S = tau_antiderivative(s / (E * deltas(gp)));
  XiResult out{GridFunction::invalid(gp, "xi"), GridFunction::invalid(gp, "g"), 0.0};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!E.valid(i) || !S.valid(i)) continue;
    const cplx den = (g.point(i) - g.limit(i)) * E[i] * (xi0_inv - S[i]);
    if (den == cplx(0.0)) throw Error(ErrorKind::ZeroDivisor, "xi denominator vanishes");
    out.xi.set(i, 1.0 / den);
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!all_valid({{&out.xi, i}, {&L.phi, i}, {&L.eta, i}, {&L.B, i}})) continue;
    if (L.B[i] == cplx(0.0)) throw Error(ErrorKind::ZeroDivisor, "B vanishes on the orbit");
    out.g.set(i, (L.phi[i] * L.phi[i] * L.eta[i] - out.xi[i]) * g.delta(i) * g.pre_delta(i) / (d * L.B[i]));
  }
  out.recursion_residual = xi_recursion_residual(L, out.xi, 0.0);
  return out;
}

}  // namespace tau
