#pragma once

// Two-point function Z(x, y) = (w(x)/2) |X(y) - X(x)|^2 + delta <X(y) - X(x), nu(x)>
// with weight w = H (or a positive solution f), and the non-collapsing
// certificates extracted from it.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "nclab/flow.hpp"

namespace nclab {

enum class Weight { mean_curvature, f_field };

/// Hypersurface realized as points in R^3. For surfaces of revolution every
/// non-pole profile vertex is repeated at M azimuths; the first
/// `base_count` points are the profile vertices at azimuth 0, and rotational
/// symmetry lets the base points stand in for every x.
struct SampledHypersurface {
  int dim = 1;
  std::vector<Vec3> X, nu;
  std::vector<double> weight, k_min, k_max;
  std::vector<std::size_t> vertex;  // source profile/curve vertex of each point
  std::size_t base_count = 0;
  std::size_t size() const { return X.size(); }
};

SampledHypersurface sample(const FlowState& s, Weight weight = Weight::mean_curvature);

struct ZEvaluation {
  std::size_t x = 0, y = 0;
  double d = 0.0;   // chord length
  Vec3 w;           // unit chord direction
  double inner = 0.0;
  double delta = 0.0;
  double z = 0.0;
};

/// Throws std::invalid_argument when x == y.
ZEvaluation z_value(const SampledHypersurface& s, std::size_t x, std::size_t y, double delta);

/// One extremal value and where it is attained. y == x marks the diagonal
/// (y -> x) limit term at vertex x. `finite` is false for the exterior
/// "no constraint" marker; `present` is false when enclosure is absent.
struct Extremum {
  double value = 0.0;
  std::size_t x = 0, y = 0;
  bool finite = true;
  bool present = true;
  bool diagonal() const { return x == y; }
};

struct Certificates {
  Extremum interior, exterior, enclosure;
};

struct SearchOptions {
  int threads = 1;
  bool prune = false;
};

/// Interior, exterior and enclosure constants in one exhaustive (or pruned)
/// pass over all pairs (x, y) with x a base point. Throws InvariantViolation if
/// some weight is non-positive.
Certificates delta_certificates(const SampledHypersurface& s, const SearchOptions& o = {});

Extremum interior_delta_star(const SampledHypersurface& s, const SearchOptions& o = {});
Extremum exterior_delta_star(const SampledHypersurface& s, const SearchOptions& o = {});
Extremum enclosure_delta(const SampledHypersurface& s, const SearchOptions& o = {});

/// Interior constant restricted to a single base point x (pairs plus the
/// diagonal term at x).
double vertex_delta_star(const SampledHypersurface& s, std::size_t x);

/// Minimum over y != x of Z(x, y).
double min_z(const SampledHypersurface& s, std::size_t x, double delta);

struct PinchingSpectrum {
  std::vector<double> interior;  // least eigenvalue of w g - delta h per vertex
  std::vector<double> exterior;  // least eigenvalue of w g + delta h per vertex
  double min_interior = 0.0, min_exterior = 0.0;
};

PinchingSpectrum pinching_spectrum(const FlowState& s, double delta, Weight weight = Weight::mean_curvature);

enum class Side { interior, exterior };

struct BallCheck {
  bool avoids = false;     // open ball misses every sample and lies on the requested side
  double clearance = 0.0;  // min over y != x of |X(y) - p| - radius
  Vec3 centre;
  double radius = 0.0;
};

/// Ball of radius delta / w(x) tangent at base point x, centred at
/// X(x) -+ (delta / w(x)) nu(x).
BallCheck touching_ball_check(const FlowState& state, const SampledHypersurface& s, std::size_t x, double delta,
                              Side side);

struct NoncollapseReport {
  double t = 0.0;
  bool f_certificate = false;
  Extremum interior, exterior, enclosure;
  double pinch_min_interior = 0.0;
  std::optional<double> pinch_min_exterior;  // absent when the exterior constant is infinite
  double r_in = 0.0, r_out = 0.0;
  double H_min = 0.0, H_max = 0.0;
  Vec3 in_center, out_center;
};

struct ReportOptions {
  SearchOptions search;
  Weight weight = Weight::mean_curvature;
  bool radii = true;
};

NoncollapseReport report(const FlowState& s, const ReportOptions& o = {});

struct MonotonicityVerdict {
  std::string quantity;
  bool passed = true;
  double worst_violation = 0.0;  // largest excess beyond the slack (<= 0 when passed)
  std::size_t at = 0;            // report index where the worst step ends
  std::size_t compared = 0;      // number of consecutive pairs compared
};

struct Certification {
  std::vector<NoncollapseReport> reports;
  MonotonicityVerdict interior, exterior, enclosure;
};

struct CertifyOptions {
  ReportOptions report;
  double slack = 1e-3;
  /// Only reports with t <= t_max enter the verdicts.
  double t_max = 1e300;
};

/// Verdicts over already computed reports.
Certification verdicts(std::vector<NoncollapseReport> reports, double slack, double t_max = 1e300);

Certification certify(const std::vector<FlowState>& snapshots, const CertifyOptions& o = {});

}  // namespace nclab
