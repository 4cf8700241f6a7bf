#include "nclab/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nclab {

StabilityError::StabilityError(const std::string& what, double dt)
    : std::runtime_error(what + "; use dt <= " + std::to_string(dt)), suggested_dt(dt) {}

std::string to_string(Termination t) {
  switch (t) {
    case Termination::time_limit: return "time-limit";
    case Termination::h_blowup: return "H-blowup";
    case Termination::invariant_violation: return "invariant-violation";
  }
  return "unknown";
}

FlowState make_state(Geometry g, std::vector<double> f, double t) {
  FlowState s;
  s.fields = compute_fields(g);
  if (!f.empty() && f.size() != vertex_count(g)) throw std::invalid_argument("f must have one value per vertex");
  s.fields.f = std::move(f);
  s.geometry = std::move(g);
  s.t = t;
  return s;
}

double curvature_dt_bound(const FlowState& s, const FlowParams& p) {
  double a2 = *std::max_element(s.fields.norm_A2.begin(), s.fields.norm_A2.end());
  return a2 > 0.0 ? p.c_stab / a2 : std::numeric_limits<double>::infinity();
}

double diffusion_dt_bound(const FlowState& s, const FlowParams& p) {
  double h = spacing(s.geometry).min;
  return p.c_diff * h * h / (dimension(s.geometry) == 2 ? 2.0 : 1.0);
}

double stable_dt(const FlowState& s, const FlowParams& p) {
  return p.dt_safety * std::min(curvature_dt_bound(s, p), diffusion_dt_bound(s, p));
}

namespace {

void check_dt(const FlowState& s, double dt, const FlowParams& p, bool curvature) {
  if (!(dt >= 0.0)) throw std::invalid_argument("time step must be non-negative");
  const double slack = 1.0 + 1e-12;
  if (curvature && dt > curvature_dt_bound(s, p) * slack)
    throw StabilityError("dt exceeds c_stab / max|A|^2", stable_dt(s, p));
  if (dt > diffusion_dt_bound(s, p) * slack)
    throw StabilityError("dt exceeds the diffusion bound c_diff * h_min^2", stable_dt(s, p));
}

bool is_sphere_type(const Geometry& g) {
  const auto* s = std::get_if<AxisymmetricSurface>(&g);
  return s && s->topology == ProfileTopology::sphere;
}

std::vector<Vec2>& mutable_vertices(Geometry& g) {
  if (auto* c = std::get_if<DiscreteCurve>(&g)) return c->vertices;
  return std::get<AxisymmetricSurface>(g).profile;
}

}  // namespace

FlowState mcf_step(const FlowState& s, double dt, const FlowParams& p) {
  check_dt(s, dt, p, true);
  Geometry g = s.geometry;
  auto& v = mutable_vertices(g);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] -= s.fields.normal[i] * (s.fields.H[i] * dt);
  if (is_sphere_type(g)) {
    v.front().x = 0.0;
    v.back().x = 0.0;
  }
  std::vector<double> f = s.fields.f;
  bool remeshed = false;
  if (p.remesh) {
    Spacing sp = spacing(g);
    if (sp.max > p.remesh_ratio * sp.min) {
      std::vector<std::vector<double>*> carried;
      if (!f.empty()) carried.push_back(&f);
      g = remesh(g, carried);
      remeshed = true;
    }
  }
  FlowState out = make_state(std::move(g), std::move(f), s.t + dt);
  out.step = s.step + 1;
  out.remeshed = remeshed;
  return out;
}

FlowState f_step(const FlowState& s, double dt, const FlowParams& p) {
  const auto& f = s.fields.f;
  if (f.empty()) throw std::invalid_argument("f_step: state carries no f field");
  if (!(*std::min_element(f.begin(), f.end()) > 0.0)) throw std::invalid_argument("f_step: f must be positive");
  check_dt(s, dt, p, false);
  std::vector<double> lap = laplacian(s.geometry, f);
  FlowState out = s;
  for (std::size_t i = 0; i < f.size(); ++i) out.fields.f[i] = f[i] + dt * (lap[i] + s.fields.norm_A2[i] * f[i]);
  return out;
}

FlowState advance(const FlowState& s, double dt, const FlowParams& p) {
  if (s.fields.f.empty()) return mcf_step(s, dt, p);
  return mcf_step(f_step(s, dt, p), dt, p);
}

std::vector<double> initial_field(const Geometry& g, const VertexFields& fields, FieldInit init, double constant) {
  const std::size_t n = vertex_count(g);
  switch (init) {
    case FieldInit::none: return {};
    case FieldInit::mean_curvature: return fields.H;
    case FieldInit::constant: return std::vector<double>(n, constant);
    case FieldInit::support: {
      std::vector<double> f(n);
      const auto& v = vertices(g);
      for (std::size_t i = 0; i < n; ++i) f[i] = dot(v[i], fields.normal[i]);
      return f;
    }
  }
  return {};
}

namespace {

std::optional<std::string> embedding_problem(const Geometry& g) {
  const auto& v = vertices(g);
  const bool closed = !is_sphere_type(g);
  if (auto hit = find_self_intersection(v, closed))
    return "self-intersection between segments " + std::to_string(hit->first) + " and " + std::to_string(hit->second);
  if (std::holds_alternative<AxisymmetricSurface>(g)) {
    const std::size_t lo = closed ? 0 : 1, hi = closed ? v.size() : v.size() - 1;
    for (std::size_t i = lo; i < hi; ++i)
      if (!(v[i].x > 0.0)) return "profile vertex " + std::to_string(i) + " reached the axis";
  }
  return std::nullopt;
}

}  // namespace

Trajectory evolve(const Geometry& initial, const EvolveOptions& o) {
  Trajectory traj;
  FlowState state = make_state(initial);
  const bool use_f = o.f_init != FieldInit::none;
  if (use_f) {
    state.fields.f = initial_field(state.geometry, state.fields, o.f_init, o.f_constant);
    if (!(*std::min_element(state.fields.f.begin(), state.fields.f.end()) > 0.0))
      throw std::invalid_argument("initial f must be positive");
  } else if (!(*std::min_element(state.fields.H.begin(), state.fields.H.end()) > 0.0)) {
    throw InvariantViolation("initial geometry is not mean-convex (min H <= 0); enable the f field to proceed");
  }
  traj.h_cap = o.h_cap_factor * *std::max_element(state.fields.H.begin(), state.fields.H.end());

  auto take = [&](const FlowState& s) {
    if (o.on_snapshot) o.on_snapshot(s);
    if (o.keep_snapshots) traj.snapshots.push_back(s);
  };
  take(state);
  bool last_taken = true;

  long snap_index = 1;
  auto next_snapshot = [&] {
    return o.snapshot_interval > 0.0 ? double(snap_index) * o.snapshot_interval : std::numeric_limits<double>::infinity();
  };

  while (state.t < o.t_end) {
    double dt = stable_dt(state, o.params);
    double target = std::min(o.t_end, next_snapshot());
    bool lands = false;
    if (target - state.t <= dt) {
      dt = target - state.t;
      lands = true;
    }
    FlowState next;
    try {
      next = advance(state, dt, o.params);
    } catch (const std::exception& e) {
      traj.termination = Termination::invariant_violation;
      traj.message = e.what();
      break;
    }
    if (lands) next.t = target;
    state = std::move(next);
    ++traj.steps;
    last_taken = false;

    const auto& H = state.fields.H;
    if (!use_f && !(*std::min_element(H.begin(), H.end()) > 0.0)) {
      traj.termination = Termination::invariant_violation;
      traj.message = "mean convexity lost at t = " + std::to_string(state.t);
      break;
    }
    if (use_f && !(*std::min_element(state.fields.f.begin(), state.fields.f.end()) > 0.0)) {
      traj.termination = Termination::invariant_violation;
      traj.message = "f lost positivity at t = " + std::to_string(state.t);
      break;
    }
    if (*std::max_element(H.begin(), H.end()) > traj.h_cap) {
      traj.termination = Termination::h_blowup;
      take(state);
      last_taken = true;
      break;
    }
    if (lands && state.t == next_snapshot()) {
      ++snap_index;
      if (auto problem = embedding_problem(state.geometry)) {
        traj.termination = Termination::invariant_violation;
        traj.message = *problem + " at t = " + std::to_string(state.t);
        break;
      }
      take(state);
      last_taken = true;
    }
  }
  if (!last_taken && traj.termination == Termination::time_limit) take(state);
  traj.final_time = state.t;
  return traj;
}

}  // namespace nclab
