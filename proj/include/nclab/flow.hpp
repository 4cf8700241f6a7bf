#pragma once

// Explicit mean curvature flow of discrete hypersurfaces, optionally carrying
// a scalar f with df/dt = Laplacian f + |A|^2 f.

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "nclab/geometry.hpp"

namespace nclab {

/// A requested time step exceeds a stability bound.
class StabilityError : public std::runtime_error {
 public:
  StabilityError(const std::string& what, double suggested_dt);
  double suggested_dt;
};

/// A flow-state invariant (mean convexity, f > 0, embeddedness) failed.
class InvariantViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FlowParams {
  double c_stab = 0.2;        // dt <= c_stab / max |A|^2
  double c_diff = 0.5;        // dt <= c_diff * h_min^2 (halved on surfaces)
  double dt_safety = 0.4;     // fraction of the tighter bound used by evolve
  bool remesh = true;
  double remesh_ratio = 3.0;  // remesh when max/min spacing exceeds this
};

struct FlowState {
  Geometry geometry;
  VertexFields fields;  // fields.f holds the transported scalar when present
  double t = 0.0;
  long step = 0;
  bool remeshed = false;  // the last step resampled the vertices
};

/// Fields computed and f attached (f must be empty or one value per vertex).
FlowState make_state(Geometry g, std::vector<double> f = {}, double t = 0.0);

double curvature_dt_bound(const FlowState& s, const FlowParams& p);
double diffusion_dt_bound(const FlowState& s, const FlowParams& p);
/// dt_safety * min(curvature bound, diffusion bound).
double stable_dt(const FlowState& s, const FlowParams& p);

/// One explicit step X <- X - H nu dt, remeshing when the spacing ratio
/// exceeds the threshold. Any f is carried unchanged through the remesh.
FlowState mcf_step(const FlowState& s, double dt, const FlowParams& p = {});

/// One explicit step of df/dt = Laplacian f + |A|^2 f on the current geometry.
FlowState f_step(const FlowState& s, double dt, const FlowParams& p = {});

/// f_step and mcf_step on the same dt, f evaluated on the old geometry.
FlowState advance(const FlowState& s, double dt, const FlowParams& p = {});

enum class FieldInit { none, mean_curvature, constant, support };

struct EvolveOptions {
  FlowParams params;
  double t_end = 0.0;
  double snapshot_interval = 0.0;  // 0: initial and final snapshots only
  double h_cap_factor = 1000.0;    // stop once max H exceeds this times the initial max H
  FieldInit f_init = FieldInit::none;
  double f_constant = 1.0;
  /// Called on every snapshot as it is taken.
  std::function<void(const FlowState&)> on_snapshot;
  /// Keep snapshots in the returned trajectory.
  bool keep_snapshots = true;
};

enum class Termination { time_limit, h_blowup, invariant_violation };

std::string to_string(Termination t);

struct Trajectory {
  std::vector<FlowState> snapshots;
  Termination termination = Termination::time_limit;
  std::string message;  // diagnostic for invariant violations
  long steps = 0;
  double h_cap = 0.0;
  double final_time = 0.0;
};

/// Initial f for a geometry.
std::vector<double> initial_field(const Geometry& g, const VertexFields& fields, FieldInit init, double constant);

/// Evolve until t_end, blowup of max H, or an invariant violation. Throws
/// InvariantViolation for non-mean-convex input unless an f field is used.
Trajectory evolve(const Geometry& initial, const EvolveOptions& options);

}  // namespace nclab
