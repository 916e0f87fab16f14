#include "tau/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <utility>

#include "tau/error.hpp"
#include "tau/hilbert.hpp"

namespace tau {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRoundtripTol = 1e-11;
constexpr double kCorrespondenceTol = 1e-12;
constexpr double kPearsonTol = 1e-9;
constexpr double kFixedTol = 1e-12;

std::vector<double> scan_points(Interval dom, int samples, double clip) {
  const double lo = std::max(dom.lo, -clip);
  const double hi = std::min(dom.hi, clip);
  std::vector<double> xs;
  xs.reserve(static_cast<std::size_t>(std::max(samples, 1)));
  for (int i = 0; i < samples; ++i) xs.push_back(samples == 1 ? lo : lo + (hi - lo) * i / (samples - 1));
  return xs;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

double VariableChange::roundtrip_error(int samples, double clip) const {
  double worst = 0.0;
  for (double x : scan_points(source, samples, clip)) {
    worst = std::max(worst, std::abs(kappa_inv(kappa(x)) - x) / (1.0 + std::abs(x)));
  }
  return worst;
}

bool VariableChange::monotone(int samples, double clip) const {
  const auto xs = scan_points(source, samples, clip);
  int sign = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double d = kappa(xs[i]) - kappa(xs[i - 1]);
    const int s = d > 0 ? 1 : (d < 0 ? -1 : 0);
    if (s == 0 || (sign != 0 && s != sign)) return false;
    sign = s;
  }
  return true;
}

VariableChange VariableChange::then(const VariableChange& outer) const {
  auto k1 = kappa;
  auto k1i = kappa_inv;
  auto k2 = outer.kappa;
  auto k2i = outer.kappa_inv;
  return {[k1, k2](double x) { return k2(k1(x)); }, [k1i, k2i](double y) { return k1i(k2i(y)); }, source,
          outer.target, outer.name + " o " + name};
}

VariableChange VariableChange::identity() {
  return {[](double x) { return x; }, [](double y) { return y; }, {-kInf, kInf}, {-kInf, kInf}, "identity"};
}

VariableChange VariableChange::ln() {
  return {[](double x) { return std::log(x); }, [](double y) { return std::exp(y); }, {0.0, kInf}, {-kInf, kInf},
          "ln"};
}

VariableChange VariableChange::exp() {
  return {[](double x) { return std::exp(x); }, [](double y) { return std::log(y); }, {-kInf, kInf}, {0.0, kInf},
          "exp"};
}

VariableChange VariableChange::affine(double p, double q) {
  if (p == 0.0) throw Error(ErrorKind::ConfigError, "affine change needs p != 0");
  return {[p, q](double x) { return p * x + q; }, [p, q](double y) { return (y - q) / p; }, {-kInf, kInf},
          {-kInf, kInf}, "affine(" + num(p) + "," + num(q) + ")"};
}

VariableChange VariableChange::powerlaw(double p) {
  if (!(p > 0.0)) throw Error(ErrorKind::ConfigError, "power change needs p > 0");
  return {[p](double x) { return std::pow(x, p); }, [p](double y) { return std::pow(y, 1.0 / p); }, {0.0, kInf},
          {0.0, kInf}, "pow(" + num(p) + ")"};
}

ChangeReport validate(const VariableChange& ch, int samples, double clip) {
  ChangeReport r;
  r.roundtrip = ch.roundtrip_error(samples, clip);
  r.monotone = ch.monotone(samples, clip);
  r.ok = r.roundtrip <= kRoundtripTol;
  if (!r.ok) r.warnings.push_back(ch.name + ": roundtrip error " + num(r.roundtrip));
  if (!r.monotone) r.warnings.push_back(ch.name + ": not strictly monotone on the sampled source");
  return r;
}

TauMap conjugate_map(const TauMap& map, const VariableChange& ch) {
  const Interval src = ch.source;
  auto through = [src, k = ch.kappa, ki = ch.kappa_inv](const RealFn& step, double y) {
    const double x = ki(y);
    if (!src.contains(x)) throw Error(ErrorKind::DomainEscape, "kappa^-1(" + num(y) + ") leaves the source");
    const double tx = step(x);
    if (!src.contains(tx)) throw Error(ErrorKind::DomainEscape, "tau(" + num(x) + ") leaves the source");
    return k(tx);
  };
  auto fwd = [through, map](double y) { return through([&map](double x) { return map.forward(x); }, y); };
  auto inv = [through, map](double y) { return through([&map](double x) { return map.inverse(x); }, y); };
  return TauMap(fwd, inv, ch.target, ch.name + "[" + map.name() + "]");
}

GridPtr image_grid(const OrbitGrid& grid, const VariableChange& ch) {
  std::vector<OrbitSegment> segs = grid.segments();
  for (auto& s : segs) {
    for (auto& p : s.points) p = ch.kappa(p);
    s.pre_point = ch.kappa(s.pre_point);
    s.post_point = ch.kappa(s.post_point);
    s.limit = ch.kappa(s.limit);
    for (std::size_t j = 0; j < s.points.size(); ++j) {
      const double next = j + 1 < s.points.size() ? s.points[j + 1] : s.post_point;
      s.deltas[j] = s.points[j] - next;
    }
  }
  return std::make_shared<const OrbitGrid>(conjugate_map(grid.map(), ch), grid.mode(), std::move(segs));
}

void require_correspondence(const OrbitGrid& source, const OrbitGrid& target, const VariableChange& ch) {
  const auto& a = source.segments();
  const auto& b = target.segments();
  if (a.size() != b.size()) throw Error(ErrorKind::GridMismatch, "segment counts differ");
  for (std::size_t s = 0; s < a.size(); ++s) {
    if (a[s].points.size() != b[s].points.size() || a[s].first_n != b[s].first_n) {
      throw Error(ErrorKind::GridMismatch, "segment " + std::to_string(s) + " differs in shape");
    }
  }
  for (std::size_t i = 0; i < source.size(); ++i) {
    const double want = ch.kappa(source.point(i));
    const double got = target.point(i);
    if (!(std::abs(got - want) <= kCorrespondenceTol * (1.0 + std::abs(want)))) {
      throw Error(ErrorKind::GridMismatch, "target point " + num(got) + " is not kappa(" + num(source.point(i)) + ")");
    }
  }
}

GridFunction inverse_jacobian(const OrbitGrid& source, const GridPtr& target) {
  std::vector<cplx> v(target->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = source.delta(i) / target->delta(i);
  return GridFunction(target, std::move(v), "J");
}

GridFunction kappa_derivative_factor(const OrbitGrid& source, const GridPtr& target) {
  std::vector<cplx> v(target->size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = target->delta(i) / source.delta(i);
  return GridFunction(target, std::move(v), "d kappa");
}

GridFunction transport_function(const GridFunction& f, const VariableChange& ch, const GridPtr& target) {
  require_correspondence(f.grid(), *target, ch);
  return GridFunction(target, f.values(), f.mask(), f.label());
}

GridFunction transport_solution(const GridFunction& psi, const VariableChange& ch, const GridPtr& target) {
  return transport_function(psi, ch, target);
}

ChainLevel transport_level(const ChainLevel& level, const VariableChange& ch, const GridPtr& target) {
  const auto& src = level.grid();
  require_correspondence(src, *target, ch);
  auto K = [&](const GridFunction& f) { return GridFunction(target, f.values(), f.mask(), f.label()); };

  const auto J = inverse_jacobian(src, target);
  // T~^-1 J at every point, from the predecessor deltas of both grids.
  std::vector<cplx> jp(target->size());
  for (std::size_t i = 0; i < jp.size(); ++i) jp[i] = src.pre_delta(i) / target->pre_delta(i);
  const GridFunction J_pre(target, std::move(jp), "T^-1 J");

  auto rho = K(level.w.rho) * J;
  auto B = K(level.B) * (J_pre / J);
  auto h = K(level.h) / J;
  WeightedGrid w = make_weighted(std::move(rho));

  auto out = make_level(level.k, std::move(B), K(level.eta), std::move(h), K(level.f), std::move(w));
  out.g = K(level.g);
  out.c = level.c;
  out.d = level.d;

  const auto before = pearson_residual(PearsonTriple::from(level.B, level.eta), level.w);
  const auto after = pearson_residual(PearsonTriple::from(out.B, out.eta), out.w);
  const bool source_ok = std::max(before.derivative_form, before.shift_form) < kPearsonTol;
  if (source_ok && !(std::max(after.derivative_form, after.shift_form) < kPearsonTol)) {
    throw Error(ErrorKind::VerificationFailed,
                "transported Pearson residual " + num(std::max(after.derivative_form, after.shift_form)));
  }
  return out;
}

int count_fixed_points(const TauMap& map, Interval scan, int resolution) {
  int count = 0;
  int last = 0;
  bool in_zero = false;
  for (double x : scan_points(scan, resolution, kInf)) {
    const double r = map(x) - x;
    if (std::abs(r) <= kFixedTol * (1.0 + std::abs(x))) {
      if (!in_zero) ++count;
      in_zero = true;
      last = 0;
      continue;
    }
    const int s = r > 0 ? 1 : -1;
    if (!in_zero && last != 0 && s != last) ++count;
    in_zero = false;
    last = s;
  }
  return count;
}

ObstructionReport equivalence_obstruction(const TauMap& a, Interval scan_a, const TauMap& b, Interval scan_b,
                                          int resolution) {
  ObstructionReport r;
  r.fixed_points_a = count_fixed_points(a, scan_a, resolution);
  r.fixed_points_b = count_fixed_points(b, scan_b, resolution);
  r.verdict = r.fixed_points_a == r.fixed_points_b ? Equivalence::Inconclusive : Equivalence::NotEquivalent;
  return r;
}

ObstructionReport equivalence_obstruction(const TauMap& a, const TauMap& b, int resolution) {
  auto clipped = [](Interval d) { return Interval{std::max(d.lo, -10.0), std::min(d.hi, 10.0)}; };
  return equivalence_obstruction(a, clipped(a.domain()), b, clipped(b.domain()), resolution);
}

}  // namespace tau
