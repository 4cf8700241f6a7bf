#include <doctest.h>

#include "nclab/flow.hpp"
#include "oracles.hpp"

using namespace nclab;

namespace {

double mean_radius(const Geometry& g) {
  const auto& v = vertices(g);
  double s = 0.0;
  for (const Vec2& p : v) s += std::hypot(p.x, p.y);
  return s / double(v.size());
}

double max_radius_dev(const Geometry& g, double r) {
  double m = 0.0;
  for (const Vec2& p : vertices(g)) m = std::max(m, std::abs(std::hypot(p.x, p.y) - r));
  return m;
}

// Sphere profile: radius is distance from the origin (centre stays fixed by symmetry).
Trajectory run(const ShapeDescriptor& d, double t_end, double interval = 0.0, FieldInit f = FieldInit::none,
               double c = 1.0, double h_cap = 1000.0) {
  EvolveOptions o;
  o.t_end = t_end;
  o.snapshot_interval = interval;
  o.f_init = f;
  o.f_constant = c;
  o.h_cap_factor = h_cap;
  return evolve(build(d), o);
}

// RK4 for the scalar ODE f' = 2 f / (R0^2 - 4 t).
double sphere_f_oracle(double c, double R0, double t) {
  auto rhs = [&](double s, double f) { return 2.0 * f / (R0 * R0 - 4.0 * s); };
  const int n = 20000;
  const double h = t / n;
  double f = c, s = 0.0;
  for (int i = 0; i < n; ++i) {
    double k1 = rhs(s, f), k2 = rhs(s + h / 2, f + h / 2 * k1), k3 = rhs(s + h / 2, f + h / 2 * k2),
           k4 = rhs(s + h, f + h * k3);
    f += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    s += h;
  }
  return f;
}

}  // namespace

TEST_CASE("mcf_step: unit circle with a small step becomes the circle of radius sqrt(1 - 2 dt)") {
  FlowState s = make_state(build({CircleSpec{1.0}, 512}));
  const double dt = 0.1 * stable_dt(s, {});
  FlowState n = mcf_step(s, dt);
  CHECK(n.t == doctest::Approx(dt));
  CHECK(n.step == 1);
  CHECK(max_radius_dev(n.geometry, std::sqrt(1.0 - 2.0 * dt)) <= dt * dt + 1e-14);
}

TEST_CASE("mcf_step: enclosed area changes by -2 pi dt for any embedded curve") {
  for (const ShapeDescriptor& d : {ShapeDescriptor{EllipseSpec{2.0, 1.0}, 512}, ShapeDescriptor{CircleSpec{0.3}, 256},
                                   ShapeDescriptor{FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 512}}) {
    FlowState s = make_state(build(d));
    const double dt = stable_dt(s, {});
    FlowState n = mcf_step(s, dt);
    const double dA = oracle::shoelace(vertices(n.geometry)) - oracle::shoelace(vertices(s.geometry));
    // Relative error O(h^2 + dt): about 1.6e-4 for the coarse small circle.
    CHECK(std::abs(dA + 2.0 * oracle::pi * dt) <= 1e-3 * 2.0 * oracle::pi * dt);
  }
}

TEST_CASE("mcf_step: a step beyond the curvature bound raises StabilityError suggesting a stable dt") {
  FlowState s = make_state(build({EllipseSpec{2.0, 1.0}, 128}));
  const double bound = curvature_dt_bound(s, {});
  // max |A|^2 = (a / b^2)^2 = 4 at the tips.
  CHECK(bound == doctest::Approx(0.2 / 4.0).epsilon(1e-2));
  try {
    mcf_step(s, 10.0 * bound);
    FAIL("expected StabilityError");
  } catch (const StabilityError& e) {
    CHECK(e.suggested_dt == doctest::Approx(stable_dt(s, {})));
    CHECK(e.suggested_dt <= bound);
    CHECK_NOTHROW(mcf_step(s, e.suggested_dt));
  }
  CHECK_THROWS_AS(mcf_step(s, -1.0), std::invalid_argument);
}

TEST_CASE("f_step: dt beyond the diffusion bound is rejected; f <= 0 is a precondition error") {
  FlowState s = make_state(build({CircleSpec{1.0}, 1024}));
  s.fields.f.assign(vertex_count(s.geometry), 1.0);
  const double h = spacing(s.geometry).min;
  CHECK(diffusion_dt_bound(s, {}) == doctest::Approx(0.5 * h * h));
  CHECK_THROWS_AS(f_step(s, 0.6 * h * h), StabilityError);
  CHECK_NOTHROW(f_step(s, 0.4 * h * h));
  FlowState z = s;
  z.fields.f.assign(vertex_count(s.geometry), 0.0);
  CHECK_THROWS_AS(f_step(z, 0.1 * h * h), std::invalid_argument);
  FlowState none = make_state(s.geometry);
  CHECK_THROWS_AS(f_step(none, 0.1 * h * h), std::invalid_argument);
  CHECK_THROWS_AS(make_state(s.geometry, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("evolve: circle R=1 to t = 0.45 has radius sqrt(0.1) within 1e-3") {
  Trajectory tr = run({CircleSpec{1.0}, 256}, 0.45, 0.05);
  CHECK(tr.termination == Termination::time_limit);
  REQUIRE(tr.snapshots.size() == 10);
  for (const FlowState& s : tr.snapshots) {
    const double exact = std::sqrt(1.0 - 2.0 * s.t);
    CHECK(std::abs(mean_radius(s.geometry) - exact) <= 1e-3 * exact);
  }
  CHECK(tr.snapshots.back().t == 0.45);
  CHECK(std::abs(mean_radius(tr.snapshots.back().geometry) - std::sqrt(0.1)) <= 1e-3 * std::sqrt(0.1));
}

TEST_CASE("evolve: round sphere R0 = 1 at t = 0.8 R0^2 / 4 has radius sqrt(R0^2 - 4t) within 1e-3") {
  Trajectory tr = run({SphereSpec{1.0}, 128, 16}, 0.2);
  const FlowState& last = tr.snapshots.back();
  CHECK(last.t == 0.2);
  const double exact = std::sqrt(1.0 - 0.8);
  CHECK(std::abs(mean_radius(last.geometry) - exact) <= 1e-3 * exact);
  CHECK(max_radius_dev(last.geometry, exact) <= 1e-3 * exact);
}

TEST_CASE("evolve: t_end = 0 yields the single initial snapshot") {
  Trajectory tr = run({EllipseSpec{2.0, 1.0}, 64}, 0.0, 0.1);
  REQUIRE(tr.snapshots.size() == 1);
  CHECK(tr.snapshots[0].t == 0.0);
  CHECK(tr.steps == 0);
  CHECK(tr.termination == Termination::time_limit);
}

TEST_CASE("evolve: ellipse(2,1) terminates by H blowup near extinction and rounds out") {
  // Area 2 pi shrinks at rate 2 pi: extinction at T = 1.
  Trajectory tr = run({EllipseSpec{2.0, 1.0}, 256}, 2.0, 0.1, FieldInit::none, 1.0, 50.0);
  CHECK(tr.termination == Termination::h_blowup);
  CHECK(tr.final_time > 0.99);
  CHECK(tr.final_time < 1.0 + 1e-3);
  const FlowState& last = tr.snapshots.back();
  CHECK(measures(last.geometry).isoperimetric_ratio < 1.01);
  for (std::size_t i = 1; i < tr.snapshots.size(); ++i) CHECK(tr.snapshots[i].t > tr.snapshots[i - 1].t);
}

TEST_CASE("evolve: non-mean-convex input is rejected unless an f field is carried") {
  ShapeDescriptor star{FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 256};
  EvolveOptions o;
  o.t_end = 0.01;
  CHECK_THROWS_AS(evolve(build(star), o), InvariantViolation);
  o.f_init = FieldInit::support;
  Trajectory tr = evolve(build(star), o);
  CHECK(tr.termination == Termination::time_limit);
  CHECK(tr.final_time == 0.01);
}

TEST_CASE("evolve: f identically zero is forbidden") {
  CHECK_THROWS_AS(run({CircleSpec{1.0}, 64}, 0.1, 0.0, FieldInit::constant, 0.0), std::invalid_argument);
}

TEST_CASE("f field: f0 = H on a shrinking circle tracks 1 / sqrt(1 - 2t)") {
  Trajectory tr = run({CircleSpec{1.0}, 256}, 0.4, 0.05, FieldInit::mean_curvature);
  REQUIRE(tr.snapshots.size() == 9);
  for (const FlowState& s : tr.snapshots) {
    const double exact = 1.0 / std::sqrt(1.0 - 2.0 * s.t);
    for (double f : s.fields.f) CHECK(std::abs(f - exact) <= 2e-3 * exact);
  }
}

TEST_CASE("f field: constant f0 on a round sphere follows f' = |A|^2 f") {
  Trajectory tr = run({SphereSpec{1.0}, 128, 16}, 0.15, 0.05, FieldInit::constant, 3.0);
  for (const FlowState& s : tr.snapshots) {
    const double exact = sphere_f_oracle(3.0, 1.0, s.t);
    CHECK(exact == doctest::Approx(3.0 / std::sqrt(1.0 - 4.0 * s.t)).epsilon(1e-10));
    for (double f : s.fields.f) CHECK(std::abs(f - exact) <= 2e-3 * exact);
  }
}

TEST_CASE("f field: f stays positive on the star with f0 = support function") {
  Trajectory tr = run({FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 256}, 0.2, 0.05, FieldInit::support);
  CHECK(tr.termination == Termination::time_limit);
  for (const FlowState& s : tr.snapshots) CHECK(*std::min_element(s.fields.f.begin(), s.fields.f.end()) > 0.0);
}

TEST_CASE("length and area strictly decrease along trajectories") {
  SUBCASE("ellipse length") {
    Trajectory tr = run({EllipseSpec{2.0, 1.0}, 256}, 0.6, 0.05);
    REQUIRE(tr.snapshots.size() == 13);
    for (std::size_t i = 1; i < tr.snapshots.size(); ++i)
      CHECK(measures(tr.snapshots[i].geometry).boundary < measures(tr.snapshots[i - 1].geometry).boundary);
  }
  SUBCASE("ellipsoid area") {
    Trajectory tr = run({EllipsoidSpec{1.0, 1.5}, 96, 16}, 0.2, 0.04);
    REQUIRE(tr.snapshots.size() == 6);
    for (std::size_t i = 1; i < tr.snapshots.size(); ++i)
      CHECK(measures(tr.snapshots[i].geometry).boundary < measures(tr.snapshots[i - 1].geometry).boundary);
  }
}

TEST_CASE("avoidance: concentric circles stay disjoint") {
  Trajectory inner = run({CircleSpec{1.0}, 128}, 0.45, 0.05);
  Trajectory outer = run({CircleSpec{1.5}, 192}, 0.45, 0.05);
  REQUIRE(inner.snapshots.size() == outer.snapshots.size());
  for (std::size_t k = 0; k < inner.snapshots.size(); ++k) {
    const auto& a = vertices(inner.snapshots[k].geometry);
    const auto& b = vertices(outer.snapshots[k].geometry);
    double gap = 1e300;
    for (const Vec2& p : a)
      for (std::size_t j = 0; j < b.size(); ++j) gap = std::min(gap, oracle::segment_distance(p, b[j], b[(j + 1) % b.size()]));
    CHECK(gap > 0.4);
    for (const Vec2& p : a) CHECK(oracle::winding(b, p) == 1);
  }
}

TEST_CASE("convergence: halving h (and with it dt) shrinks the circle radius error") {
  auto error = [](int n) {
    Trajectory tr = run({CircleSpec{1.0}, n}, 0.3);
    return std::abs(mean_radius(tr.snapshots.back().geometry) - std::sqrt(0.4));
  };
  const double e1 = error(64), e2 = error(128), e3 = error(256);
  MESSAGE("radius errors " << e1 << " " << e2 << " " << e3);
  // dt scales with h^2, so the error O(dt + h^2) drops by about 4 per halving.
  CHECK(e1 / e2 > 3.0);
  CHECK(e2 / e3 > 3.0);
}
