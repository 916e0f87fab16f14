#pragma once

#include <string>
#include <vector>

#include "tau/chain.hpp"
#include "tau/grid_function.hpp"
#include "tau/orbit_grid.hpp"
#include "tau/tau_map.hpp"

namespace tau {

/// kappa: source -> target with its inverse. kappa is assumed a homeomorphism;
/// only sampled checks are made.
struct VariableChange {
  RealFn kappa;
  RealFn kappa_inv;
  Interval source;
  Interval target;
  std::string name = "custom";

  /// Largest |kappa_inv(kappa(x)) - x| / (1 + |x|) on a uniform scan of the
  /// source, clipped to [-clip, clip].
  double roundtrip_error(int samples = 1000, double clip = 10.0) const;
  /// Strict monotonicity of kappa on the same scan.
  bool monotone(int samples = 1000, double clip = 10.0) const;

  /// outer o this.
  VariableChange then(const VariableChange& outer) const;

  static VariableChange identity();
  /// ln on [0, inf).
  static VariableChange ln();
  static VariableChange exp();
  /// x -> p x + q, p != 0.
  static VariableChange affine(double p, double q);
  /// x -> x^p on [0, inf), p > 0.
  static VariableChange powerlaw(double p);
};

struct ChangeReport {
  double roundtrip = 0.0;
  bool monotone = true;
  /// False when the roundtrip exceeds 1e-11.
  bool ok = true;
  std::vector<std::string> warnings;
};

ChangeReport validate(const VariableChange& ch, int samples = 1000, double clip = 10.0);

/// kappa o tau o kappa^-1 on the target, inverse kappa o tau^-1 o kappa^-1.
/// Evaluation throws DomainEscape when a point leaves the source.
TauMap conjugate_map(const TauMap& map, const VariableChange& ch);

/// Pointwise kappa-image of a grid, carrying the conjugated map. Deltas are
/// recomputed from the mapped points.
GridPtr image_grid(const OrbitGrid& grid, const VariableChange& ch);

/// GridMismatch unless target is the kappa-image of source within 1e-12 (1 + |y|).
void require_correspondence(const OrbitGrid& source, const OrbitGrid& target, const VariableChange& ch);

/// (d_tau~ kappa^-1) on the target grid: Delta_n / Delta~_n.
GridFunction inverse_jacobian(const OrbitGrid& source, const GridPtr& target);

/// (d_tau kappa) o kappa^-1 on the target grid: Delta~_n / Delta_n.
GridFunction kappa_derivative_factor(const OrbitGrid& source, const GridPtr& target);

/// psi o kappa^-1 on the target grid.
GridFunction transport_function(const GridFunction& f, const VariableChange& ch, const GridPtr& target);
GridFunction transport_solution(const GridFunction& psi, const VariableChange& ch, const GridPtr& target);

/// rho~ = J rho, B~ = (T~^-1 J / J) B, eta~ = eta, g~ = g, h~ = h / J, f~ = f,
/// J = d_tau~ kappa^-1. The transported tau~-Pearson residual is verified.
ChainLevel transport_level(const ChainLevel& level, const VariableChange& ch, const GridPtr& target);

enum class Equivalence { NotEquivalent, Inconclusive };

struct ObstructionReport {
  int fixed_points_a = 0;
  int fixed_points_b = 0;
  Equivalence verdict = Equivalence::Inconclusive;
};

/// Fixed points of tau on a uniform scan: each run of |tau(x) - x| <= 1e-12 (1 + |x|)
/// counts once, as does each sign change between nonzero samples.
int count_fixed_points(const TauMap& map, Interval scan, int resolution = 1000);

ObstructionReport equivalence_obstruction(const TauMap& a, const TauMap& b, int resolution = 1000);
ObstructionReport equivalence_obstruction(const TauMap& a, Interval scan_a, const TauMap& b, Interval scan_b,
                                          int resolution = 1000);

}  // namespace tau
