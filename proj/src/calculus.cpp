#include "tau/calculus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tau/error.hpp"

namespace tau {

namespace {

// Real and strictly positive up to rounding in the imaginary part.
double positive_real(cplx z, const char* what) {
  if (z == cplx(0.0)) throw Error(ErrorKind::FactorZero, std::string(what) + " vanishes");
  if (std::abs(z.imag()) > 1e-14 * std::abs(z) || !(z.real() > 0.0)) {
    throw Error(ErrorKind::NonPositiveFactor, std::string(what) + " is not a positive real");
  }
  return z.real();
}

}  // namespace

GridFunction shift(const GridFunction& f, long steps) {
  const auto& g = f.grid();
  auto out = GridFunction::invalid(f.grid_ptr(), f.label());
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const long len = static_cast<long>(g.segments()[s].points.size());
    const auto off = g.offset(s);
    for (long j = 0; j < len; ++j) {
      const long src = j + steps;
      if (src < 0 || src >= len) continue;
      const auto si = off + static_cast<std::size_t>(src);
      if (f.valid(si)) out.set(off + static_cast<std::size_t>(j), f[si]);
    }
  }
  return out;
}

GridFunction tau_derivative(const GridFunction& f) {
  const auto& g = f.grid();
  auto out = GridFunction::invalid(f.grid_ptr(), "d_tau " + f.label());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !f.valid(i) || !f.valid(i + 1)) continue;
    out.set(i, (f[i] - f[i + 1]) / g.delta(i));
  }
  return out;
}

GridFunction tau_antiderivative(const GridFunction& f, SeriesStatus* status, double tol) {
  const auto& g = f.grid();
  auto out = GridFunction::invalid(f.grid_ptr(), "int " + f.label());
  SeriesStatus st;
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto& seg = g.segments()[s];
    const auto off = g.offset(s);
    cplx sum = 0.0;
    bool started = false;
    bool broken = false;
    int terms = 0;
    double last3 = 0.0;
    for (std::size_t jj = seg.points.size(); jj-- > 0;) {
      const auto i = off + jj;
      if (!f.valid(i)) {
        if (started) broken = true;
        continue;
      }
      if (broken) continue;
      started = true;
      const cplx term = g.delta(i) * f[i];
      if (terms < 3) last3 = std::max(last3, std::abs(term));
      ++terms;
      sum += term;
      out.set(i, sum);
    }
    if (started) {
      const double bound = tol * std::max(1.0, std::abs(sum)) * (1.0 + std::abs(seg.limit));
      st.tail_bound = std::max(st.tail_bound, last3);
      if (terms < 3 || last3 > bound) st.converged = false;
    }
  }
  if (status) *status = st;
  return out;
}

IntegralResult tau_integral(const GridFunction& f, double tol) {
  const auto& g = f.grid();
  IntegralResult r;
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto& seg = g.segments()[s];
    const auto off = g.offset(s);
    cplx sum = 0.0;
    std::vector<double> mags;
    for (std::size_t j = 0; j < seg.points.size(); ++j) {
      if (!f.valid(off + j)) continue;
      const cplx term = seg.deltas[j] * f[off + j];
      sum += term;
      mags.push_back(std::abs(term));
    }
    double tail = 0.0;
    for (std::size_t k = 0; k < std::min<std::size_t>(3, mags.size()); ++k) tail = std::max(tail, mags[mags.size() - 1 - k]);
    double bound = tol * std::max(1.0, std::abs(sum)) * (1.0 + std::abs(seg.limit));
    if (mags.size() < 3 || tail > bound) r.converged = false;
    if (g.mode() == OrbitMode::Group) {
      double head = 0.0;
      for (std::size_t k = 0; k < std::min<std::size_t>(3, mags.size()); ++k) head = std::max(head, mags[k]);
      if (head > tol * std::max(1.0, std::abs(sum))) r.converged = false;
      tail = std::max(tail, head);
    }
    r.tail_bound = std::max(r.tail_bound, tail);
    r.value += seg.orientation * sum;
  }
  return r;
}

IntegralResult tau_integral(const GridFunction& f, IntegralMode mode, double tol) {
  const auto gm = f.grid().mode();
  const bool ok = (mode == IntegralMode::Orbit && gm == OrbitMode::Semigroup) ||
                  (mode == IntegralMode::Interval && gm == OrbitMode::Interval) ||
                  (mode == IntegralMode::Group && gm == OrbitMode::Group);
  if (!ok) throw Error(ErrorKind::GridMismatch, "integral mode does not match the grid mode");
  return tau_integral(f, tol);
}

GridFunction tail_product(const GridFunction& F) {
  const auto& g = F.grid();
  auto out = GridFunction::invalid(F.grid_ptr(), "prod " + F.label());
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto& seg = g.segments()[s];
    const auto off = g.offset(s);
    cplx prod = 1.0;
    bool started = false;
    bool broken = false;
    for (std::size_t jj = seg.points.size(); jj-- > 0;) {
      const auto i = off + jj;
      if (!F.valid(i)) {
        if (started) broken = true;
        continue;
      }
      if (broken) continue;
      started = true;
      prod *= F[i];
      out.set(i, prod);
    }
  }
  return out;
}

GridFunction tau_exponential(const GridPtr& grid, SeriesStatus* status) {
  std::vector<cplx> inv(grid->size());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double factor = 1.0 - grid->delta(i);
    if (factor == 0.0) throw Error(ErrorKind::FactorZero, "1 - Delta vanishes at x=" + std::to_string(grid->point(i)));
    inv[i] = 1.0 / factor;
  }
  auto out = tail_product(GridFunction(grid, std::move(inv)));
  out.set_label("exp_tau");
  if (status) {
    status->converged = grid->size() < 3 || contraction_estimate(grid->map(), *grid) < 1.0;
    status->tail_bound = 0.0;
  }
  return out;
}

ProductResult product_integral(const GridFunction& F, std::size_t segment) {
  const auto& g = F.grid();
  if (segment >= g.segments().size()) throw Error(ErrorKind::GridMismatch, "segment index out of range");
  auto logs = GridFunction::invalid(F.grid_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!F.valid(i) || g.segment_of(i) != segment) continue;
    logs.set(i, std::log(positive_real(F[i], "product factor")) / g.delta(i));
  }
  SeriesStatus st;
  const auto prim = tau_antiderivative(logs, &st);
  ProductResult r;
  const auto off = g.offset(segment);
  const auto len = g.segments()[segment].points.size();
  std::size_t first = len;
  for (std::size_t j = 0; j < len; ++j) {
    if (prim.valid(off + j)) {
      first = j;
      break;
    }
  }
  if (first == len) return r;
  for (std::size_t j = first; j < len; ++j)
    if (F.valid(off + j)) r.value *= F[off + j].real();
  r.via_log = std::exp(prim[off + first].real());
  r.converged = st.converged;
  r.tail_bound = st.tail_bound;
  if (std::abs(r.value - r.via_log) > 1e-10 * std::max(std::abs(r.value), std::abs(r.via_log))) {
    throw Error(ErrorKind::VerificationFailed, "direct and logarithmic products disagree");
  }
  return r;
}

GridFunction solve_linear_first_order(const GridFunction& f, cplx init) {
  const auto& g = f.grid();
  auto integrand = GridFunction::invalid(f.grid_ptr());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!f.valid(i)) continue;
    const double factor = positive_real(1.0 - g.delta(i) * f[i], "1 - Delta f");
    integrand.set(i, -std::log(factor) / g.delta(i));
  }
  auto psi = tau_antiderivative(integrand).map([init](cplx s) { return init * std::exp(s); });
  psi.set_label("psi");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i) || !psi.valid(i) || !psi.valid(i + 1)) continue;
    const cplx lhs = psi[i + 1];
    const cplx rhs = (1.0 - g.delta(i) * f[i]) * psi[i];
    if (std::abs(lhs - rhs) > 1e-10 * std::max(std::abs(lhs), std::abs(psi[i]))) {
      throw Error(ErrorKind::VerificationFailed, "first-order solution residual too large");
    }
  }
  return psi;
}

}  // namespace tau
