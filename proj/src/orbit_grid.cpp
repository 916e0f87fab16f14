#include "tau/orbit_grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <string>
#include <utility>

#include "tau/error.hpp"

namespace tau {

namespace {

void require_in_domain(const TauMap& map, double x, double tol, const char* what) {
  if (!std::isfinite(x) || !map.domain().contains(x, tol * (1.0 + std::abs(x)))) {
    throw Error(ErrorKind::DomainEscape, std::string(what) + " left the domain at x=" + std::to_string(x));
  }
}

// Forward orbit of x0 with the three-small-deltas truncation rule.
OrbitSegment forward_segment(const TauMap& map, double x0, double limit, const GridSpec& spec) {
  OrbitSegment seg;
  seg.limit = limit;
  seg.points.push_back(x0);
  const double small = spec.truncation_tol * (1.0 + std::abs(limit));
  int small_run = 0;
  for (;;) {
    const double x = seg.points.back();
    const double nx = map(x);
    require_in_domain(map, nx, spec.domain_tol, "orbit");
    const double d = x - nx;
    if (d == 0.0) {
      if (seg.points.size() == 1) {
        throw Error(ErrorKind::DegenerateOrbit, "tau(x) = x at base x=" + std::to_string(x));
      }
      seg.points.pop_back();
      seg.post_point = x;
      break;
    }
    seg.deltas.push_back(d);
    small_run = std::abs(d) < small ? small_run + 1 : 0;
    if (small_run >= 3) {
      seg.post_point = nx;
      break;
    }
    if (static_cast<int>(seg.points.size()) > spec.max_depth) {
      seg.post_point = nx;
      seg.forward_hit_depth = true;
      break;
    }
    seg.points.push_back(nx);
  }
  return seg;
}

// Keeps iterating past the stopping rule while the step does not grow; stops on
// an exact fixed point or a two-cycle of rounding.
double polish_limit(const TauMap& map, double x, int max_iter) {
  double step = std::numeric_limits<double>::infinity();
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int i = 0; i < max_iter; ++i) {
    const double nx = map(x);
    const double d = std::abs(nx - x);
    if (!std::isfinite(nx) || !(d <= step) || nx == prev) break;
    step = d;
    prev = x;
    x = nx;
    if (d == 0.0) break;
  }
  // Rounding can leave x one ulp off a representable fixed point; take the
  // 12-digit value when it is at least as fixed.
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double r = std::strtod(buf, nullptr);
  if (std::isfinite(r) && std::abs(r - x) <= 1e-12 * (1.0 + std::abs(x)) &&
      std::abs(map(r) - r) <= std::abs(map(x) - x)) {
    return r;
  }
  return x;
}

bool coincide(const OrbitSegment& a, const OrbitSegment& b) {
  const double lim = b.limit;
  const double floor = 1e-12 * (1.0 + std::abs(lim));
  for (double pb : b.points) {
    const double dist = std::abs(pb - lim);
    if (dist <= floor) continue;
    for (double pa : a.points) {
      if (std::abs(pa - pb) <= 1e-10 * dist) return true;
    }
  }
  return false;
}

}  // namespace

double iterate(const TauMap& map, double x0, long n, double domain_tol) {
  require_in_domain(map, x0, domain_tol, "start point");
  double x = x0;
  const long steps = n < 0 ? -n : n;
  for (long i = 0; i < steps; ++i) {
    x = n > 0 ? map.forward(x) : map.inverse(x);
    require_in_domain(map, x, domain_tol, "iterate");
  }
  return x;
}

LimitResult limit_point(const TauMap& map, double x0, double tol, int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) throw Error(ErrorKind::ConfigError, "limit_point needs tol > 0, max_iter >= 1");
  LimitResult r;
  double x = x0;
  for (int i = 1; i <= max_iter; ++i) {
    const double nx = map(x);
    r.iterations = i;
    if (!std::isfinite(nx)) {
      r.value = nx;
      return r;
    }
    if (std::abs(nx - x) < tol * (1.0 + std::abs(x))) {
      r.value = nx;
      r.converged = true;
      return r;
    }
    x = nx;
  }
  r.value = x;
  return r;
}

OrbitGrid::OrbitGrid(TauMap map, OrbitMode mode, std::vector<OrbitSegment> segments)
    : map_(std::move(map)), mode_(mode), segments_(std::move(segments)) {
  for (const auto& s : segments_) {
    if (s.points.empty() || s.points.size() != s.deltas.size()) {
      throw Error(ErrorKind::ConfigError, "orbit segment needs matching non-empty points and deltas");
    }
    offsets_.push_back(size_);
    size_ += s.points.size();
  }
}

std::size_t OrbitGrid::segment_of(std::size_t i) const {
  if (i >= size_) throw Error(ErrorKind::GridMismatch, "grid index out of range");
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), i);
  return static_cast<std::size_t>(it - offsets_.begin()) - 1;
}

double OrbitGrid::point(std::size_t i) const {
  const auto s = segment_of(i);
  return segments_[s].points[i - offsets_[s]];
}

double OrbitGrid::delta(std::size_t i) const {
  const auto s = segment_of(i);
  return segments_[s].deltas[i - offsets_[s]];
}

double OrbitGrid::next_point(std::size_t i) const {
  const auto s = segment_of(i);
  const auto j = i - offsets_[s];
  const auto& seg = segments_[s];
  return j + 1 < seg.points.size() ? seg.points[j + 1] : seg.post_point;
}

double OrbitGrid::pre_delta(std::size_t i) const {
  const auto s = segment_of(i);
  const auto j = i - offsets_[s];
  const auto& seg = segments_[s];
  return j > 0 ? seg.deltas[j - 1] : seg.pre_point - seg.points[0];
}

long OrbitGrid::orbit_index(std::size_t i) const {
  const auto s = segment_of(i);
  return segments_[s].first_n + static_cast<long>(i - offsets_[s]);
}

bool OrbitGrid::has_next(std::size_t i) const { return !is_last(i); }

bool OrbitGrid::has_prev(std::size_t i) const { return local(i) > 0; }

bool OrbitGrid::is_base(std::size_t i) const {
  return local(i) == 0 && segments_[segment_of(i)].has_base;
}

bool OrbitGrid::is_last(std::size_t i) const {
  const auto s = segment_of(i);
  return i - offsets_[s] + 1 == segments_[s].points.size();
}

std::vector<double> OrbitGrid::all_points() const {
  std::vector<double> out;
  out.reserve(size_);
  for (const auto& s : segments_) out.insert(out.end(), s.points.begin(), s.points.end());
  return out;
}

OrbitGrid build_grid(const TauMap& map, const GridSpec& spec) {
  const std::size_t want = spec.mode == OrbitMode::Interval ? 2 : 1;
  if (spec.bases.size() != want) throw Error(ErrorKind::ConfigError, "wrong number of bases for the grid mode");
  if (spec.max_depth < 2) throw Error(ErrorKind::ConfigError, "max_depth must be at least 2");

  auto limit_of = [&](double x0) {
    require_in_domain(map, x0, spec.domain_tol, "base");
    const auto lr = limit_point(map, x0, spec.fixed_point_tol, spec.max_iter);
    if (!lr.converged) {
      throw Error(ErrorKind::TailNotConverged, "orbit of " + std::to_string(x0) + " has no detected limit");
    }
    return polish_limit(map, lr.value, spec.max_iter);
  };

  std::vector<OrbitSegment> segs;
  if (spec.mode == OrbitMode::Interval) {
    const double a = spec.bases[0];
    const double b = spec.bases[1];
    const double la = limit_of(a);
    const double lb = limit_of(b);
    if (std::abs(la - lb) > 1e3 * spec.fixed_point_tol * (1.0 + std::abs(lb))) {
      throw Error(ErrorKind::LimitMismatch, "limits " + std::to_string(la) + " and " + std::to_string(lb) + " differ");
    }
    auto sa = forward_segment(map, a, la, spec);
    auto sb = forward_segment(map, b, lb, spec);
    if (coincide(sa, sb) || coincide(sb, sa)) {
      throw Error(ErrorKind::CoincidentOrbits, "orbit(b) meets orbit(a)");
    }
    sa.orientation = -1.0;
    sa.pre_point = map.inverse(a);
    sb.pre_point = map.inverse(b);
    segs.push_back(std::move(sa));
    segs.push_back(std::move(sb));
  } else if (spec.mode == OrbitMode::Semigroup) {
    const double x0 = spec.bases[0];
    auto s = forward_segment(map, x0, limit_of(x0), spec);
    s.pre_point = map.inverse(x0);
    segs.push_back(std::move(s));
  } else {
    const double x0 = spec.bases[0];
    auto s = forward_segment(map, x0, limit_of(x0), spec);
    // Backward direction: stop on three consecutive small weighted deltas.
    const auto back_lim = limit_point(map.inverted(), x0,
                                      spec.fixed_point_tol, spec.max_iter);
    const double scale = back_lim.converged ? 1.0 + std::abs(back_lim.value) : 1.0;
    std::vector<double> bpts;
    std::vector<double> bdel;
    double cur = x0;
    int small_run = 0;
    while (static_cast<int>(bpts.size()) < spec.max_depth) {
      const double prev = map.inverse(cur);
      if (!std::isfinite(prev) || !map.domain().contains(prev, spec.domain_tol * (1.0 + std::abs(prev)))) break;
      const double d = prev - cur;
      if (d == 0.0) break;
      bpts.push_back(prev);
      bdel.push_back(d);
      const double w = spec.backward_weight ? spec.backward_weight(prev) : 1.0;
      small_run = std::abs(d * w) < spec.truncation_tol * scale ? small_run + 1 : 0;
      cur = prev;
      if (small_run >= 3) break;
    }
    s.backward_hit_depth = static_cast<int>(bpts.size()) >= spec.max_depth && small_run < 3;
    OrbitSegment g;
    g.limit = s.limit;
    g.post_point = s.post_point;
    g.forward_hit_depth = s.forward_hit_depth;
    g.backward_hit_depth = s.backward_hit_depth;
    g.has_base = false;
    g.first_n = -static_cast<long>(bpts.size());
    g.points.assign(bpts.rbegin(), bpts.rend());
    g.deltas.assign(bdel.rbegin(), bdel.rend());
    g.points.insert(g.points.end(), s.points.begin(), s.points.end());
    g.deltas.insert(g.deltas.end(), s.deltas.begin(), s.deltas.end());
    g.pre_point = map.inverse(g.points.front());
    segs.push_back(std::move(g));
  }
  return OrbitGrid(map, spec.mode, std::move(segs));
}

double contraction_estimate(const TauMap& map, const OrbitGrid& grid) {
  double worst = 0.0;
  for (const auto& s : grid.segments()) {
    for (std::size_t j = 0; j + 1 < s.points.size(); ++j) {
      const double x = s.points[j];
      const double y = s.points[j + 1];
      if (x == y) return std::numeric_limits<double>::infinity();
      const double fx = map(x);
      const double fy = map(y);
      worst = std::max(worst, std::abs(fx - fy) / std::abs(x - y));
    }
  }
  return worst;
}

}  // namespace tau
