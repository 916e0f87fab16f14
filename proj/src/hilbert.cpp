#include "tau/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "tau/error.hpp"

namespace tau {

bool WeightedGrid::all_positive() const {
  return std::all_of(positivity.begin(), positivity.end(), [](std::uint8_t f) { return f != 0; });
}

WeightedGrid make_weighted(GridFunction rho) {
  WeightedGrid w{std::move(rho), {}};
  const auto& g = w.grid();
  w.positivity.assign(g.size(), 1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!w.rho.valid(i)) continue;
    if (!std::isfinite(w.rho[i].real()) || !std::isfinite(w.rho[i].imag())) {
      throw Error(ErrorKind::ZeroWeight, "weight is not finite at x=" + std::to_string(g.point(i)));
    }
    w.positivity[i] = g.orientation(i) * g.delta(i) * w.rho[i].real() >= 0.0 ? 1 : 0;
  }
  return w;
}

PearsonTriple PearsonTriple::from(GridFunction B, GridFunction eta) {
  auto A = (B - eta) / deltas(B.grid_ptr());
  A.set_label("A");
  return {std::move(B), std::move(eta), std::move(A)};
}

IntegralResult inner_product(const GridFunction& phi, const GridFunction& psi, const WeightedGrid& w) {
  return tau_integral(phi.conj() * psi * w.rho);
}

double norm(const GridFunction& psi, const WeightedGrid& w) {
  return std::sqrt(std::max(0.0, inner_product(psi, psi, w).value.real()));
}

GridFunction shift_mu(const WeightedGrid& w) {
  const auto& g = w.grid();
  auto mu = GridFunction::invalid(w.grid_ptr(), "mu");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_prev(i) || !w.rho.valid(i) || !w.rho.valid(i - 1)) continue;
    if (w.rho[i] == cplx(0.0)) {
      throw Error(ErrorKind::ZeroWeight, "rho vanishes at x=" + std::to_string(g.point(i)) + "; split the orbit there");
    }
    mu.set(i, g.pre_delta(i) * w.rho[i - 1] / (g.delta(i) * w.rho[i]));
  }
  return mu;
}

GridFunction adjoint_shift(const GridFunction& phi, const WeightedGrid& w) {
  const auto& g = w.grid();
  const auto mu = shift_mu(w);
  auto out = GridFunction::invalid(phi.grid_ptr(), "T* " + phi.label());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.is_base(i)) {
      out.set(i, 0.0);
    } else if (g.has_prev(i) && mu.valid(i) && phi.valid(i - 1)) {
      out.set(i, mu[i] * phi[i - 1]);
    }
  }
  return out;
}

ShiftNorm shift_norm(const WeightedGrid& w) {
  const auto mu = shift_mu(w);
  const auto& g = w.grid();
  ShiftNorm r;
  r.value = std::sqrt(mu.sup_abs());
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    std::vector<double> tail;
    const auto off = g.offset(s);
    for (std::size_t j = g.segments()[s].points.size(); j-- > 0 && tail.size() < 5;) {
      if (mu.valid(off + j)) tail.push_back(std::abs(mu[off + j]));
    }
    if (tail.size() < 5) continue;
    // tail[0] is the deepest point.
    bool growing = true;
    for (std::size_t k = 0; k + 1 < tail.size(); ++k) growing = growing && tail[k] > tail[k + 1];
    if (growing && tail.front() > tail.back() * (1.0 + 1e-6)) r.unbounded = true;
  }
  return r;
}

WeightedGrid weight_from_pearson(const PearsonTriple& p, const std::vector<double>& base_values) {
  const auto& g = p.B.grid();
  if (base_values.size() != g.segments().size()) throw Error(ErrorKind::ConfigError, "one base value per orbit segment");
  auto rho = GridFunction::invalid(p.B.grid_ptr(), "rho");
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto off = g.offset(s);
    const auto len = g.segments()[s].points.size();
    rho.set(off, base_values[s]);
    for (std::size_t j = 0; j + 1 < len; ++j) {
      const auto i = off + j;
      if (!p.eta.valid(i) || !p.B.valid(i + 1)) break;
      if (p.B[i + 1] == cplx(0.0)) {
        throw Error(ErrorKind::ZeroDivisor, "B vanishes at interior x=" + std::to_string(g.point(i + 1)));
      }
      rho.set(i + 1, p.eta[i] * rho[i] / p.B[i + 1]);
    }
  }
  return make_weighted(std::move(rho));
}

WeightedGrid weight_from_pearson(const PearsonTriple& p, double base_value) {
  return weight_from_pearson(p, std::vector<double>(p.B.grid().segments().size(), base_value));
}

PearsonResidual pearson_residual(const PearsonTriple& p, const WeightedGrid& w) {
  const auto& g = w.grid();
  PearsonResidual r;
  double eta_rho = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (p.eta.valid(i) && w.rho.valid(i)) eta_rho = std::max(eta_rho, std::abs(p.eta[i] * w.rho[i]));
  const double shift_scale = std::max(1.0, eta_rho);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_next(i)) continue;
    if (!(p.B.valid(i) && p.B.valid(i + 1) && w.rho.valid(i) && w.rho.valid(i + 1) && p.eta.valid(i) &&
          p.A_coeff.valid(i))) {
      continue;
    }
    const cplx b0 = p.B[i] * w.rho[i];
    const cplx b1 = p.B[i + 1] * w.rho[i + 1];
    const double d = g.delta(i);
    const cplx lhs = (b0 - b1) / d;
    const cplx rhs = p.A_coeff[i] * w.rho[i];
    const double scale = std::max({1.0, (std::abs(b0) + std::abs(b1)) / std::abs(d), std::abs(rhs)});
    r.derivative_form = std::max(r.derivative_form, std::abs(lhs - rhs) / scale);
    r.shift_form = std::max(r.shift_form, std::abs(b1 - p.eta[i] * w.rho[i]) / shift_scale);
  }
  return r;
}

GridFunction adjoint_mu_k(const GridFunction& B, const GridFunction& eta) {
  const auto& g = B.grid();
  auto mu = GridFunction::invalid(B.grid_ptr(), "mu_k");
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.has_prev(i) || !B.valid(i) || !eta.valid(i - 1)) continue;
    if (eta[i - 1] == cplx(0.0)) throw Error(ErrorKind::ZeroDivisor, "eta vanishes at x=" + std::to_string(g.point(i - 1)));
    mu.set(i, g.pre_delta(i) / g.delta(i) * B[i] / eta[i - 1]);
  }
  return mu;
}

GridFunction adjoint_derivative(const GridFunction& psi, const GridFunction& eta, const WeightedGrid& w) {
  const auto u = eta * psi / deltas(psi.grid_ptr());
  auto out = u - adjoint_shift(u, w);
  out.set_label("d_tau* " + psi.label());
  return out;
}

}  // namespace tau
