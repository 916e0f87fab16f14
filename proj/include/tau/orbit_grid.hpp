#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "tau/tau_map.hpp"

namespace tau {

enum class OrbitMode { Semigroup, Interval, Group };

struct LimitResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// tau^n(x0); negative n iterates the inverse.
double iterate(const TauMap& map, double x0, long n, double domain_tol = 1e-12);

/// Iterates until |x_{n+1} - x_n| < tol (1 + |x_n|).
LimitResult limit_point(const TauMap& map, double x0, double tol = 1e-13, int max_iter = 10000);

struct GridSpec {
  OrbitMode mode = OrbitMode::Semigroup;
  /// One base for Semigroup and Group, (a, b) for Interval.
  std::vector<double> bases;
  double fixed_point_tol = 1e-13;
  int max_iter = 10000;
  int max_depth = 512;
  double truncation_tol = 1e-15;
  /// Backward truncation weight for group orbits; defaults to 1.
  RealFn backward_weight;
  double domain_tol = 1e-12;
};

/// One orbit piece. Invariant: deltas[j] == points[j] - next(j) bitwise,
/// where next(last) is post_point.
struct OrbitSegment {
  long first_n = 0;
  std::vector<double> points;
  std::vector<double> deltas;
  double pre_point = 0.0;
  double post_point = 0.0;
  double limit = 0.0;
  /// -1 for orbit(a) in interval mode, +1 otherwise.
  double orientation = 1.0;
  /// True when points[0] has no predecessor inside the orbit.
  bool has_base = true;
  /// Group mode: backward direction stopped at max_depth instead of the decay test.
  bool backward_hit_depth = false;
  bool forward_hit_depth = false;
};

class OrbitGrid {
 public:
  OrbitGrid(TauMap map, OrbitMode mode, std::vector<OrbitSegment> segments);

  const TauMap& map() const noexcept { return map_; }
  OrbitMode mode() const noexcept { return mode_; }
  const std::vector<OrbitSegment>& segments() const noexcept { return segments_; }

  std::size_t size() const noexcept { return size_; }
  std::size_t segment_of(std::size_t i) const;
  std::size_t local(std::size_t i) const { return i - offsets_[segment_of(i)]; }
  std::size_t offset(std::size_t seg) const { return offsets_[seg]; }

  double point(std::size_t i) const;
  double delta(std::size_t i) const;
  /// tau(point(i)), also defined at the last index of a segment.
  double next_point(std::size_t i) const;
  /// Delta at the predecessor tau^-1(point(i)) - point(i); always defined.
  double pre_delta(std::size_t i) const;
  long orbit_index(std::size_t i) const;
  double limit(std::size_t i) const { return segments_[segment_of(i)].limit; }
  double orientation(std::size_t i) const { return segments_[segment_of(i)].orientation; }

  bool has_next(std::size_t i) const;
  bool has_prev(std::size_t i) const;
  /// Semigroup base: no predecessor exists in the orbit at all.
  bool is_base(std::size_t i) const;
  bool is_first(std::size_t i) const { return local(i) == 0; }
  bool is_last(std::size_t i) const;

  std::vector<double> all_points() const;

 private:
  TauMap map_;
  OrbitMode mode_;
  std::vector<OrbitSegment> segments_;
  std::vector<std::size_t> offsets_;
  std::size_t size_ = 0;
};

OrbitGrid build_grid(const TauMap& map, const GridSpec& spec);

/// max over consecutive points of |tau(x) - tau(y)| / |x - y|.
double contraction_estimate(const TauMap& map, const OrbitGrid& grid);

}  // namespace tau
