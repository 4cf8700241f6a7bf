#pragma once

// Finite-difference verification of the two-point function's derivative
// identities on exact surfaces and on numerically evolved states.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nclab/analytic.hpp"
#include "nclab/flow.hpp"

namespace nclab {

class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class IdentityId { Zy, Zx, Zyy, Zxy, Zxx, Zt, Lemma1, EvolutionIdentity };

std::string to_string(IdentityId id);
std::optional<IdentityId> parse_identity(const std::string& name);

struct IdentityResidual {
  IdentityId id = IdentityId::Zy;
  std::string configuration;
  std::uint64_t config_hash = 0;
  double h = 0.0;                    // step (space or time) of the reported residual
  double residual = 0.0;             // absolute, max-abs over components
  std::optional<double> residual_half;  // residual at h / 2
  std::optional<double> order;       // log2(residual / residual_half)
  double tolerance = 0.0;
  bool passed = false;
  bool skipped = false;              // precondition failed; counted as passed
  std::string note;
};

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(const std::string& s);

struct PairConfig {
  AnalyticSurface surface;
  Param x, y;
  double delta = 1.0;
};

std::string describe(const PairConfig& c);

/// Right-hand sides of the derivative identities in orthonormal normal
/// coordinates at x and y. Index conventions: zy[i], zx[i], zyy[i][j],
/// zxy[i][j] = d^2 Z / dy^i dx^j, zxx[i][j].
struct ZDerivatives {
  int dim = 1;
  double z = 0.0;
  double zy[2]{}, zx[2]{};
  double zyy[2][2]{}, zxy[2][2]{}, zxx[2][2]{};
};

ZDerivatives analytic_derivatives(const PointData& x, const PointData& y, double delta);
ZDerivatives analytic_derivatives(const PairConfig& c);

/// Central differences of Z along normal charts at x and y with step h.
ZDerivatives finite_difference_derivatives(const PairConfig& c, double h);

/// 2.5e-4 times the smallest local length scale at x and y: curvature radii and
/// the scales on which H varies.
double default_step(const PairConfig& c);

struct Tolerances {
  double first = 1e-6;
  double second = 1e-5;
  double ratio_lo = 3.5, ratio_hi = 4.5;
  double lemma1 = 1e-12;
  double time = 1e-6;
  double evolution = 1e-6;
  double evolution_order = 1.0;
  // Residuals below these (or below the estimated rounding floor at h / 2,
  // if larger) are treated as noise and exempt from the order test.
  double noise_first = 1e-12;
  double noise_second = 1e-9;

  Tolerances scaled(double f) const;
};

/// Residuals of the first-derivative identities (Zy, Zx); h <= 0 selects
/// default_step.
std::array<IdentityResidual, 2> check_first_derivatives(const PairConfig& c, double h = 0.0,
                                                        const Tolerances& tol = {});
/// Residuals of the second-derivative identities (Zyy, Zxy, Zxx).
std::array<IdentityResidual, 3> check_second_derivatives(const PairConfig& c, double h = 0.0,
                                                         const Tolerances& tol = {});

/// Both sides of the normal identity (Lemma1) from exact data; skipped when
/// delta = 0 or the radicand is negative.
IdentityResidual check_lemma1(const PairConfig& c, const Tolerances& tol = {});

/// Round circle (dim 1) or sphere (dim 2) shrinking by mean curvature flow:
/// R(t) = sqrt(R0^2 - 2 n t).
struct ShrinkingRound {
  int dim = 1;
  double R0 = 1.0;
  double radius(double t) const;
  double extinction() const;
  AnalyticSurface at(double t) const;
  /// Z at time t for material points at angular separation theta.
  double z(double t, double theta, double delta) const;
  /// Closed-form dZ/dt.
  double z_t(double t, double theta, double delta) const;
};

/// Time-derivative identity (Zt) against central differences in time of the closed form; tau <= 0
/// selects 1e-4 R(t)^2.
IdentityResidual check_time_derivative(const ShrinkingRound& s, double t, double theta, double delta,
                                       double tau = 0.0, const Tolerances& tol = {});

/// Right-hand side of the Zt identity from discrete fields at time t, for a base
/// point x and sample y of the sampled hypersurface.
double time_derivative_rhs(const FlowState& s, std::size_t x, std::size_t y, double delta);

/// Zt identity on two consecutive material snapshots (remeshing must be off).
/// Throws std::invalid_argument if b is not a remesh-free successor of a.
IdentityResidual check_time_derivative(const FlowState& a, const FlowState& b, std::size_t x, std::size_t y,
                                       double delta, double tolerance);

/// Evolution identity on a shrinking circle or sphere at the pair (x, y),
/// which must be a critical point of Z (antipodal, or any pair when
/// delta = n). Other surfaces throw UnsupportedError.
IdentityResidual check_evolution_identity(const ShrinkingRound& s, double t, const Param& x, const Param& y,
                                          double delta, const Tolerances& tol = {});

/// Evolution identity on a curve from two consecutive material snapshots,
/// at the interior delta*-argmin pair of a. Surfaces throw UnsupportedError.
IdentityResidual check_evolution_identity(const FlowState& a, const FlowState& b, double delta);

/// Refinement study of the discrete evolution identity on an evolving
/// ellipse: for each N, one explicit step from the discretized ellipse at
/// delta = factor * delta*. Reports the finest residual and the order of
/// the last halving.
IdentityResidual evolution_identity_refinement(double a, double b, const std::vector<int>& resolutions,
                                               double delta_factor, const Tolerances& tol = {});

/// Suite selector: "all" or an identity name. Throws std::invalid_argument on
/// unknown names.
std::vector<IdentityResidual> run_suite(const std::string& selector, const Tolerances& tol = {});

}  // namespace nclab
