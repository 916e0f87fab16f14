#include "tau/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "tau/error.hpp"

namespace tau {

cplx qpochhammer(cplx alpha, double q, std::optional<int> n) {
  cplx p = 1.0;
  cplx term = alpha;
  if (n) {
    for (int i = 0; i < *n; ++i) {
      p *= 1.0 - term;
      term *= q;
    }
    return p;
  }
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::ConfigError, "infinite q-Pochhammer needs 0 < q < 1");
  while (std::abs(term) >= 1e-17) {
    p *= 1.0 - term;
    term *= q;
  }
  return p;
}

double Poly::operator()(double x) const {
  double s = 0.0;
  for (std::size_t i = c.size(); i-- > 0;) s = s * x + c[i];
  return s;
}

int Poly::degree(double tol) const {
  for (std::size_t i = c.size(); i-- > 0;)
    if (std::abs(c[i]) > tol) return static_cast<int>(i);
  return -1;
}

Poly Poly::scaled(double s) const {
  Poly p = *this;
  for (auto& v : p.c) v *= s;
  return p;
}

Poly Poly::dilated(double s) const {
  Poly p = *this;
  double sk = 1.0;
  for (auto& v : p.c) {
    v *= sk;
    sk *= s;
  }
  return p;
}

Poly Poly::q_derivative(double q) const {
  Poly p;
  for (std::size_t m = 1; m < c.size(); ++m) {
    p.c.push_back(c[m] * (1.0 - std::pow(q, static_cast<double>(m))) / (1.0 - q));
  }
  if (p.c.empty()) p.c.push_back(0.0);
  return p;
}

Poly Poly::operator+(const Poly& o) const {
  Poly p;
  p.c.assign(std::max(c.size(), o.c.size()), 0.0);
  for (std::size_t i = 0; i < c.size(); ++i) p.c[i] += c[i];
  for (std::size_t i = 0; i < o.c.size(); ++i) p.c[i] += o.c[i];
  return p;
}

namespace {

GridPtr orbit_grid(const TauMap& map, const std::vector<double>& bases, int depth) {
  GridSpec s;
  s.mode = bases.size() == 2 ? OrbitMode::Interval : OrbitMode::Semigroup;
  s.bases = bases;
  s.max_depth = depth;
  s.max_iter = std::max(s.max_iter, 2 * depth);
  return std::make_shared<const OrbitGrid>(build_grid(map, s));
}

}  // namespace

double QHahnChain::eigenvalue(int n) const {
  double s = 0.0;
  for (int l = 0; l < n; ++l) s += levels[static_cast<std::size_t>(l)].c.real();
  return s;
}

GridFunction QHahnChain::ops(int n, int level) const {
  if (level + n > static_cast<int>(levels.size())) throw Error(ErrorKind::ConfigError, "not enough chain levels for this degree");
  auto psi = GridFunction::constant(grid, 1.0);
  for (int j = level + n - 1; j >= level; --j) psi = apply_Astar(levels[static_cast<std::size_t>(j)], psi);
  psi.set_label("P" + std::to_string(n));
  return psi;
}

QHahnChain qhahn_chain(const QHahnParams& p) {
  const double q = p.q;
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::ConfigError, "q-Hahn chain needs 0 < q < 1");
  if (p.B0.degree() > 2 || p.levels < 1) throw Error(ErrorKind::ConfigError, "B0 must have degree <= 2");
  QHahnChain ch;
  ch.q = q;
  ch.grid = orbit_grid(TauMap::linear(q), p.bases, p.depth);
  Poly A = p.A0.c.empty() ? Poly{{1.0, -(1.0 + q)}} : p.A0;
  if (A.degree() > 1) throw Error(ErrorKind::ConfigError, "A0 must have degree <= 1");
  Poly B = p.B0;
  const auto dl = deltas(ch.grid);
  const auto one = GridFunction::constant(ch.grid, 1.0, "h");
  for (int k = 0; k < p.levels; ++k) {
    ch.B.push_back(B);
    ch.A.push_back(A);
    auto Bk = GridFunction::sample_real(ch.grid, [B](double x) { return B(x); }, "B");
    auto eta = Bk - dl * GridFunction::sample_real(ch.grid, [A](double x) { return A(x); });
    eta.set_label("eta");
    auto f = GridFunction::constant(ch.grid, 0.0, "f");
    if (k == 0) {
      ch.levels.push_back(make_level(0, Bk, eta, one, f));
    } else {
      const auto& prev = ch.levels.back();
      ch.levels.push_back(make_level(k, Bk, eta, one, f, make_weighted(prev.eta * prev.w.rho)));
    }
    auto& L = ch.levels.back();
    L.c = -A.q_derivative(q)(0.0);
    L.d = 1.0;
    L.g = GridFunction::constant(ch.grid, 1.0 / q, "g");
    B = B.scaled(1.0 / q);
    A = A.dilated(q) + B.q_derivative(q);
  }
  return ch;
}

double ConstGChain::c(int k) const { return std::pow(params.q, 2.0 * k) * c0; }

double ConstGChain::alpha(int k, double x) const {
  const double q = params.q;
  return params.b0 / (x * x) + c(k) / (1.0 - q * q);
}

double ConstGChain::phi(int k, double x) const {
  const double q = params.q;
  return std::pow(q, 2.0 * k) * phi0(std::pow(q, static_cast<double>(k)) * x);
}

GridFunction ConstGChain::kernel_recursive() const {
  const auto& g = *grid;
  auto psi = GridFunction::invalid(grid, "psi_kernel");
  for (std::size_t s = 0; s < g.segments().size(); ++s) {
    const auto off = g.offset(s);
    psi.set(off, 1.0);
    for (std::size_t j = 1; j < g.segments()[s].points.size(); ++j) {
      const auto i = off + j;
      const double x = g.point(i);
      psi.set(i, psi[i - 1] * phi(0, x) * B0 / (g.delta(i) * alpha(0, x)));
    }
  }
  return psi;
}

GridFunction ConstGChain::kernel_product() const {
  // psi_m / psi_{m+1} = Delta(tau x) alpha_0(tau x) / (phi_0(tau x) B_0) at x = x_m.
  const auto& g = *grid;
  const auto& map = g.map();
  auto logs = GridFunction::invalid(grid, "ln F / Delta");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = g.next_point(i);
    const double F = (y - map(y)) * alpha(0, y) / (phi(0, y) * B0);
    if (!(F > 0.0)) throw Error(ErrorKind::NonPositiveFactor, "kernel product factor is not positive");
    logs.set(i, std::log(F) / g.delta(i));
  }
  auto psi = tau_antiderivative(logs).map([](cplx z) { return std::exp(z); });
  psi.set_label("psi_kernel_product");
  return psi;
}

double ConstGChain::pochhammer_profile(double x) const {
  const double q = params.q;
  const double b = params.beta_root;
  return (qpochhammer(q * x / b, q, std::nullopt) * qpochhammer(-q * x / b, q, std::nullopt)).real();
}

ConstGChain const_g_scenario(const ConstGParams& p) {
  const double q = p.q;
  if (!(q > 0.0 && q < 1.0)) throw Error(ErrorKind::ConfigError, "constant gauge chain needs 0 < q < 1");
  if (!(p.b0 > 0.0) || !(p.beta_root > 1.0)) throw Error(ErrorKind::ConfigError, "need b0 > 0 and beta_root > 1");
  ConstGChain ch;
  ch.params = p;
  ch.B0 = (1.0 - q) * (1.0 - q) * p.b0;
  ch.c0 = -p.b0 * (1.0 - q * q) / (p.beta_root * p.beta_root);
  const double kappa1 = 1.0 / (1.0 - q);
  const double kappa2 = p.kappa2;
  ch.phi0 = [kappa1, kappa2](double x) { return kappa1 / x + kappa2; };
  ch.grid = orbit_grid(TauMap::linear(q), {1.0}, p.depth);
  const auto one = GridFunction::constant(ch.grid, 1.0, "h");
  const auto dl = deltas(ch.grid);
  for (int k = 0; k < p.levels; ++k) {
    const double Bk = std::pow(q, -2.0 * k) * ch.B0;
    auto phi = GridFunction::sample_real(ch.grid, [&ch, k](double x) { return ch.phi(k, x); }, "phi");
    auto eta = GridFunction::sample_real(ch.grid, [&ch, k](double x) {
      const double ph = ch.phi(k, x);
      return ch.alpha(k, x) / (ph * ph);
    }, "eta");
    auto f = phi - one / dl;
    auto B = GridFunction::constant(ch.grid, Bk, "B");
    if (k == 0) {
      ch.levels.push_back(make_level(0, B, eta, one, f));
    } else {
      const auto& prev = ch.levels.back();
      ch.levels.push_back(make_level(k, B, eta, one, f, make_weighted(prev.eta * prev.w.rho)));
    }
    auto& L = ch.levels.back();
    L.c = ch.c(k);
    L.d = 1.0;
    L.g = GridFunction::constant(ch.grid, 1.0 / (q * q), "g");
  }
  return ch;
}

double FractionalOracles::tau_k(double x, int k) const {
  const double ak = std::pow(a, static_cast<double>(k));
  return ak * x / ((ak - 1.0) * x + 1.0);
}

double FractionalOracles::delta_at_iterate(double x, int k) const {
  const double ak = std::pow(a, static_cast<double>(k));
  const double uk = (ak - 1.0) * x + 1.0;
  const double uk1 = (ak * a - 1.0) * x + 1.0;
  return ak * (1.0 - a) * x * (1.0 - x) / (uk * uk1);
}

double FractionalOracles::dtau_tau(double x) const { return a / ((a * a - 1.0) * x + 1.0); }

double FractionalOracles::dtau_tau_at_iterate(double x, int k) const {
  const double ak = std::pow(a, static_cast<double>(k));
  return a * ((ak - 1.0) * x + 1.0) / ((ak * a * a - 1.0) * x + 1.0);
}

double FractionalOracles::fixed_point() const { return a < 1.0 ? 0.0 : 1.0; }

double FractionalOracles::required_ratio(int lambda) const {
  return std::pow(1.0 / dtau_tau(fixed_point()), static_cast<double>(lambda + 1));
}

double FractionalOracles::alpha(double x, int lambda) const {
  const double base = a < 1.0 ? ((a - 1.0) * x + 1.0) / ((1.0 - x) * (1.0 - x)) : ((a - 1.0) * x + 1.0) / (a * x * x);
  return std::pow(base, static_cast<double>(lambda + 1));
}

double FractionalOracles::psi(double x, int k) const {
  double p = 1.0;
  for (int j = 0; j < k; ++j) {
    const double uj = (std::pow(a, static_cast<double>(j)) - 1.0) * x + 1.0;
    const double uj1 = (std::pow(a, static_cast<double>(j + 1)) - 1.0) * x + 1.0;
    const double den = a < 1.0 ? (x - 1.0) * (x - 1.0) : std::pow(a, 2.0 * j + 1.0) * x * x;
    p *= uj * uj1 / den;
  }
  return p;
}

double FractionalOracles::gauge_product(int k) const {
  return a < 1.0 ? std::pow(a, -static_cast<double>(k)) : std::pow(a, static_cast<double>(k));
}

ChainLevel FractionalScenario::level(int k, double a_coef, double b_coef) const {
  const auto& g = *grid;
  const double dg = oracle.gauge_product(k);
  auto phi = GridFunction::invalid(grid, "phi");
  auto B = GridFunction::invalid(grid, "B");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g.point(i);
    const double d = k == 0 ? g.delta(i) : oracle.delta_at_iterate(x, k);
    phi.set(i, 1.0 / (dg * d));
    B.set(i, b_coef * g.delta(i) * g.pre_delta(i));
  }
  const auto one = GridFunction::constant(grid, 1.0, "h");
  auto eta = GridFunction::constant(grid, a_coef) / (phi * phi);
  auto f = phi - one / deltas(grid);
  auto L = make_level(k, B, eta, one, f);
  L.phi = phi;
  return L;
}

FractionalScenario fractional_scenario(double a, double x0, int depth, bool group) {
  FractionalScenario s{FractionalOracles{a}, TauMap::fractional(a), nullptr};
  GridSpec spec;
  spec.mode = group ? OrbitMode::Group : OrbitMode::Semigroup;
  spec.bases = {x0};
  spec.max_depth = depth;
  s.grid = std::make_shared<const OrbitGrid>(build_grid(s.map, spec));
  return s;
}

}  // namespace tau
