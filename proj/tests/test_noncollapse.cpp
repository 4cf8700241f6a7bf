#include <doctest.h>

#include <random>

#include "nclab/noncollapse.hpp"
#include "oracles.hpp"

using namespace nclab;

namespace {

FlowState state_of(const ShapeDescriptor& d) { return make_state(build(d)); }

FlowState support_state(const ShapeDescriptor& d) {
  FlowState s = make_state(build(d));
  s.fields.f = initial_field(s.geometry, s.fields, FieldInit::support, 1.0);
  return s;
}

// Exact samples of a round sphere of radius R: poles plus rings.
SampledHypersurface exact_sphere(double R, int rings, int m) {
  SampledHypersurface s;
  s.dim = 2;
  auto add = [&](Vec3 n) {
    s.X.push_back(n * R);
    s.nu.push_back(n);
    s.weight.push_back(2.0 / R);
    s.k_min.push_back(1.0 / R);
    s.k_max.push_back(1.0 / R);
    s.vertex.push_back(s.X.size());
  };
  for (int i = 1; i < rings; ++i)
    for (int j = 0; j < m; ++j) {
      const double th = oracle::pi * i / rings, ph = 2 * oracle::pi * j / m;
      add({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), -std::cos(th)});
    }
  add({0, 0, -1});
  add({0, 0, 1});
  s.base_count = s.X.size();
  return s;
}

SampledHypersurface exact_circle(double R, int n) {
  SampledHypersurface s;
  for (int i = 0; i < n; ++i) {
    const Vec3 u{std::cos(2 * oracle::pi * i / n), std::sin(2 * oracle::pi * i / n), 0.0};
    s.X.push_back(u * R);
    s.nu.push_back(u);
    s.weight.push_back(1.0 / R);
    s.k_min.push_back(1.0 / R);
    s.k_max.push_back(1.0 / R);
    s.vertex.push_back(i);
  }
  s.base_count = s.X.size();
  return s;
}

// Brute-force interior / enclosure constants of the exact ellipse at n
// parameter samples; the diagonal term of a curve is kappa / kappa = 1.
oracle::PairExtrema ellipse_oracle(double a, double b, int n) {
  std::vector<Vec2> X, nu;
  std::vector<double> w;
  for (int i = 0; i < n; ++i) {
    const double t = 2 * oracle::pi * i / n;
    X.push_back(oracle::ellipse_point(a, b, t));
    nu.push_back(oracle::ellipse_normal(a, b, t));
    w.push_back(oracle::ellipse_curvature(a, b, t));
  }
  oracle::PairExtrema e = oracle::brute_pairs(X, nu, w, X.size());
  e.interior = std::min(e.interior, 1.0);
  e.enclosure = std::max(e.enclosure, 1.0);
  return e;
}

// Exterior constant of the star weighted by the exact support function,
// including the exterior diagonal term w / -kappa where kappa < 0.
double star_exterior_oracle(int n) {
  oracle::Star star;
  std::vector<Vec2> X, nu;
  std::vector<double> w;
  double diag = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    const double t = 2 * oracle::pi * i / n;
    X.push_back(star.point(t));
    nu.push_back(star.normal(t));
    w.push_back(dot(X.back(), nu.back()));
    const double k = star.curvature(t);
    if (k < 0) diag = std::min(diag, w.back() / -k);
  }
  return std::min(oracle::brute_pairs(X, nu, w, X.size()).exterior, diag);
}

// Exterior constant of the exact torus (R0, r0): n profile samples, m azimuths.
double torus_exterior_oracle(double R0, double r0, int n, int m) {
  std::vector<Vec3> X, nu;
  std::vector<double> w;
  double diag = std::numeric_limits<double>::infinity();
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < n; ++i) {
      const double u = 2 * oracle::pi * i / n, v = 2 * oracle::pi * j / m;
      const double rho = R0 + r0 * std::cos(u);
      X.push_back({rho * std::cos(v), rho * std::sin(v), r0 * std::sin(u)});
      nu.push_back({std::cos(u) * std::cos(v), std::cos(u) * std::sin(v), std::sin(u)});
      const double k_az = std::cos(u) / rho, k_pr = 1.0 / r0;
      w.push_back(k_az + k_pr);
      if (j == 0 && k_az < 0) diag = std::min(diag, w.back() / -k_az);
    }
  return std::min(oracle::brute_pairs(X, nu, w, std::size_t(n)).exterior, diag);
}

// Largest interior ball touching the polygon at vertex x: bisection on the
// radius of the ball centred at X(x) - r nu(x) against the polygon segments,
// or against the other vertices only when `samples_only`.
double ball_growing_radius(const std::vector<Vec2>& poly, std::size_t x, Vec2 normal, bool samples_only = false) {
  const Vec2 p = poly[x];
  auto fits = [&](double r) {
    const Vec2 c = p - normal * r;
    if (oracle::winding(poly, c) == 0) return false;
    if (samples_only) {
      for (std::size_t i = 0; i < poly.size(); ++i)
        if (i != x && norm(poly[i] - c) < r) return false;
      return true;
    }
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const std::size_t j = (i + 1) % poly.size();
      if (i == x || j == x) continue;  // the two segments at x touch the ball there by construction
      if (oracle::segment_distance(c, poly[i], poly[j]) < r) return false;
    }
    // Segments at x: only their far endpoints can enter the ball.
    for (std::size_t k : {(x + 1) % poly.size(), (x + poly.size() - 1) % poly.size()})
      if (norm(poly[k] - c) < r) return false;
    return true;
  };
  double lo = 0.0, hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  return lo;
}

Geometry transformed(const Geometry& g, double scale, double angle, Vec2 shift) {
  Geometry out = g;
  const double c = std::cos(angle), s = std::sin(angle);
  auto& v = std::get<DiscreteCurve>(out).vertices;
  for (Vec2& p : v) p = Vec2{c * p.x - s * p.y, s * p.x + c * p.y} * scale + shift;
  return out;
}

}  // namespace

TEST_CASE("z_value: closed forms on exact circles and spheres") {
  SampledHypersurface c = exact_circle(1.0, 64);
  for (std::size_t y = 1; y < 64; y += 7) CHECK(std::abs(z_value(c, 0, y, 1.0).z) <= 1e-12);
  ZEvaluation e = z_value(c, 0, 32, 0.0);
  CHECK(e.z == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e.d == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(e.inner == doctest::Approx(-2.0).epsilon(1e-14));
  CHECK(norm(e.w) == doctest::Approx(1.0));

  SampledHypersurface s = exact_sphere(1.0, 12, 16);
  for (std::size_t y = 1; y < s.size(); y += 11) CHECK(std::abs(z_value(s, 0, y, 2.0).z) <= 1e-12);

  // Fields recombine within 1e-14 relative.
  SampledHypersurface g = sample(state_of({EllipseSpec{2.0, 1.0}, 128}));
  for (std::size_t y : {1u, 17u, 64u, 100u}) {
    ZEvaluation z = z_value(g, 3, y, 0.37);
    const double re = g.weight[3] / 2 * z.d * z.d + 0.37 * z.inner;
    CHECK(std::abs(z.z - re) <= 1e-14 * (std::abs(re) + z.d * z.d));
    CHECK(z.d > 0.0);
  }
  CHECK_THROWS_AS(z_value(g, 5, 5, 1.0), std::invalid_argument);
}

TEST_CASE("interior delta*: circle 1 and sphere R=2 equal n") {
  Extremum c = interior_delta_star(sample(state_of({CircleSpec{1.0}, 512})));
  CHECK(std::abs(c.value - 1.0) <= 1e-6);
  Extremum s = interior_delta_star(sample(state_of({SphereSpec{2.0}, 256, 64})));
  CHECK(std::abs(s.value - 2.0) <= 1e-3);
}

TEST_CASE("interior delta*: ellipse(2,1) matches the Richardson-extrapolated brute-force oracle") {
  const double o1 = ellipse_oracle(2.0, 1.0, 2048).interior, o2 = ellipse_oracle(2.0, 1.0, 4096).interior;
  const double limit = oracle::richardson(o1, o2, 2.0);
  Extremum e = interior_delta_star(sample(state_of({EllipseSpec{2.0, 1.0}, 2048})));
  MESSAGE("ellipse delta* " << e.value << " oracle " << o1 << " " << o2 << " limit " << limit);
  CHECK(std::abs(e.value - limit) <= 1e-4 * limit);
  // The invariant delta* <= n and the diagonal consistency bound.
  CHECK(e.value <= 1.0);
}

TEST_CASE("exterior delta: circle has no constraint; star and torus match brute-force oracles") {
  CHECK_FALSE(exterior_delta_star(sample(state_of({CircleSpec{1.0}, 512}))).finite);

  // Second-order convergence: 3e-3 relative at N = 512, 8e-4 at N = 1024.
  FlowState star = support_state({FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 1024});
  Extremum e = exterior_delta_star(sample(star, Weight::f_field), {4, true});
  const double o = star_exterior_oracle(4096);
  MESSAGE("star exterior " << e.value << " oracle " << o);
  CHECK(e.finite);
  CHECK(std::abs(e.value - o) <= 1e-3 * o);

  FlowState torus = state_of({TorusSpec{2.0, 0.5}, 128, 64});
  Extremum t = exterior_delta_star(sample(torus));
  const double ot = torus_exterior_oracle(2.0, 0.5, 256, 128);
  MESSAGE("torus exterior " << t.value << " oracle " << ot);
  CHECK(t.finite);
  CHECK(std::abs(t.value - ot) <= 1e-3 * ot);
  // Across the hole: inner equator points at distance 2 (R0 - r0) with H = 1 / r0 - 1 / (R0 - r0).
  const double across = (2.0 - 2.0 / 3.0) * 9.0 / 6.0;
  CHECK(t.value <= across * (1.0 + 1e-3));
}

TEST_CASE("enclosure delta: circle 1, sphere 2, ellipse vs oracle; absent without convexity") {
  CHECK(std::abs(enclosure_delta(sample(state_of({CircleSpec{1.0}, 512}))).value - 1.0) <= 1e-6);
  CHECK(std::abs(enclosure_delta(sample(state_of({SphereSpec{1.0}, 256, 64}))).value - 2.0) <= 1e-3);
  Extremum e = enclosure_delta(sample(state_of({EllipseSpec{2.0, 1.0}, 2048})));
  const double o = ellipse_oracle(2.0, 1.0, 8192).enclosure;
  MESSAGE("ellipse enclosure " << e.value << " oracle " << o);
  CHECK(e.present);
  CHECK(std::abs(e.value - o) <= 1e-4 * o);
  CHECK_FALSE(enclosure_delta(sample(state_of({TorusSpec{2.0, 0.5}, 64, 32}))).present);
  CHECK_FALSE(enclosure_delta(sample(support_state({FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 256}), Weight::f_field)).present);
}

TEST_CASE("delta_certificates: a non-positive weight is an invariant violation") {
  FlowState star = state_of({FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 256});
  CHECK_THROWS_AS(delta_certificates(sample(star)), InvariantViolation);
  CHECK_THROWS_AS(sample(star, Weight::f_field), std::invalid_argument);
}

TEST_CASE("pinching spectrum") {
  PinchingSpectrum c = pinching_spectrum(state_of({CircleSpec{1.0}, 512}), 1.0);
  for (double v : c.interior) CHECK(std::abs(v) <= 1e-10);
  PinchingSpectrum s = pinching_spectrum(state_of({SphereSpec{1.0}, 256, 64}), 2.0);
  for (double v : s.interior) CHECK(std::abs(v) <= 2e-3);

  FlowState e = state_of({EllipseSpec{2.0, 1.0}, 512});
  const double d = interior_delta_star(sample(e)).value;
  PinchingSpectrum p = pinching_spectrum(e, d);
  CHECK(p.min_interior >= -1e-6);
  // Direct evaluation: kappa (1 - delta) on curves.
  for (std::size_t i = 0; i < p.interior.size(); ++i)
    CHECK(p.interior[i] == doctest::Approx(e.fields.kappa[i] * (1.0 - d)).epsilon(1e-12));
}

TEST_CASE("touching balls on the unit circle") {
  FlowState st = state_of({CircleSpec{1.0}, 512});
  SampledHypersurface s = sample(st);
  BallCheck in = touching_ball_check(st, s, 7, 0.999, Side::interior);
  CHECK(in.avoids);
  CHECK(in.radius == doctest::Approx(0.999));
  // Tangent at x, so the clearance to the samples is tiny but non-negative;
  // across the circle the gap is 2 (1 - 0.999).
  CHECK(in.clearance >= 0.0);
  CHECK(in.clearance < 1e-6);
  CHECK(norm(s.X[7 + 256] - in.centre) - in.radius == doctest::Approx(0.002).epsilon(1e-6));
  CHECK_FALSE(touching_ball_check(st, s, 7, 1.01, Side::interior).avoids);
  CHECK_THROWS_AS(touching_ball_check(st, s, 7, 0.0, Side::interior), std::invalid_argument);
}

TEST_CASE("touching balls: ellipse(2,1) at (2,0) straddle the pointwise delta*(x)") {
  FlowState st = state_of({EllipseSpec{2.0, 1.0}, 512});
  SampledHypersurface s = sample(st);
  REQUIRE(std::abs(s.X[0].x - 2.0) < 1e-12);
  const double dx = vertex_delta_star(s, 0);
  // At the tip the ball osculates, so chords of the inscribed polygon cut into
  // it; the pointwise constant is a statement about the samples.
  const double oracle_dx = st.fields.H[0] * ball_growing_radius(vertices(st.geometry), 0, st.fields.normal[0], true);
  MESSAGE("delta*(x) " << dx << " ball growing " << oracle_dx);
  CHECK(dx == doctest::Approx(oracle_dx).epsilon(1e-6));
  CHECK(touching_ball_check(st, s, 0, 0.99 * dx, Side::interior).avoids);
  CHECK_FALSE(touching_ball_check(st, s, 0, 1.01 * dx, Side::interior).avoids);
  CHECK(min_z(s, 0, 0.99 * dx) >= 0.0);
  CHECK(min_z(s, 0, 1.01 * dx) < 0.0);
}

TEST_CASE("proposition equivalence: sign of min Z agrees with the touching-ball check") {
  std::mt19937_64 rng(12345);
  std::vector<FlowState> states{state_of({EllipseSpec{2.0, 1.0}, 256}), state_of({CircleSpec{0.7}, 128}),
                                state_of({EllipsoidSpec{1.0, 1.6}, 48, 24}), state_of({TorusSpec{2.0, 0.5}, 48, 24})};
  int compared = 0, banded = 0;
  for (const FlowState& st : states) {
    SampledHypersurface s = sample(st);
    std::uniform_int_distribution<std::size_t> pick(0, s.base_count - 1);
    std::uniform_real_distribution<double> delta(0.05, 2.5);
    for (int k = 0; k < 60; ++k) {
      const std::size_t x = pick(rng);
      const double d = delta(rng);
      const double mz = min_z(s, x, d);
      if (std::abs(mz) <= 1e-6) {
        ++banded;
        continue;
      }
      ++compared;
      CHECK((mz > 0.0) == touching_ball_check(st, s, x, d, Side::interior).avoids);
    }
  }
  MESSAGE(compared << " compared, " << banded << " in the boundary band");
  CHECK(compared >= 200);
}

TEST_CASE("delta* equals min over x of H(x) r_in(x) from the ball-growing oracle") {
  FlowState st = state_of({EllipseSpec{2.0, 1.0}, 256});
  const auto& v = vertices(st.geometry);
  double best = 1e300;
  for (std::size_t x = 0; x < v.size(); ++x)
    best = std::min(best, st.fields.H[x] * ball_growing_radius(v, x, st.fields.normal[x]));
  const double d = interior_delta_star(sample(st)).value;
  MESSAGE("delta* " << d << " ball growing " << best);
  CHECK(d == doctest::Approx(best).epsilon(2e-3));
}

TEST_CASE("refinement: delta*(N) converges with order >= 1") {
  // Ellipse (2, 1.3): its delta* is not pinned to a symmetric exact value.
  const double limit = oracle::richardson(ellipse_oracle(2.0, 1.3, 4096).interior, ellipse_oracle(2.0, 1.3, 8192).interior, 2.0);
  std::vector<double> err;
  for (int n : {64, 128, 256}) err.push_back(std::abs(interior_delta_star(sample(state_of({EllipseSpec{2.0, 1.3}, n}))).value - limit));
  MESSAGE("delta* errors " << err[0] << " " << err[1] << " " << err[2]);
  CHECK(std::log2(err[0] / err[1]) >= 1.0);
  CHECK(std::log2(err[1] / err[2]) >= 1.0);
}

TEST_CASE("invariance: scaling and rigid motions leave every certificate unchanged") {
  Geometry g = build({EllipseSpec{2.0, 1.0}, 256});
  Certificates base = delta_certificates(sample(make_state(g)));
  for (Geometry h : {transformed(g, 3.7, 0.0, {0, 0}), transformed(g, 0.21, 0.0, {0, 0}),
                     transformed(g, 1.0, 0.913, {-3.1, 2.4}), transformed(g, 2.5, -2.2, {10.0, 0.5})}) {
    Certificates c = delta_certificates(sample(make_state(h)));
    CHECK(std::abs(c.interior.value - base.interior.value) <= 1e-12 * base.interior.value);
    CHECK(std::abs(c.enclosure.value - base.enclosure.value) <= 1e-12 * base.enclosure.value);
    CHECK(c.exterior.finite == base.exterior.finite);
  }
  Geometry s = build({FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 256});
  auto ext = [](const Geometry& h) {
    FlowState st = make_state(h);
    st.fields.f.assign(vertex_count(h), 1.0);
    return exterior_delta_star(sample(st, Weight::f_field)).value;
  };
  // With a constant weight the constant scales like a length.
  const double e0 = ext(s);
  CHECK(std::abs(ext(transformed(s, 1.0, 1.1, {0.3, -0.7})) - e0) <= 1e-12 * e0);
  CHECK(std::abs(ext(transformed(s, 2.0, 0.0, {0, 0})) / 2.0 - e0) <= 1e-12 * e0);
}

TEST_CASE("sphere rigidity: delta* = enclosure = n only on round shapes") {
  Certificates c = delta_certificates(sample(state_of({CircleSpec{1.0}, 1024})));
  CHECK(std::abs(c.interior.value - 1.0) <= 1e-4);
  CHECK(std::abs(c.enclosure.value - 1.0) <= 1e-4);
  Certificates e = delta_certificates(sample(state_of({EllipseSpec{1.2, 1.0}, 1024})));
  CHECK(e.interior.value < 1.0 - 1e-2);
  CHECK(e.enclosure.value > 1.0 + 1e-2);
  Certificates q = delta_certificates(sample(state_of({EllipsoidSpec{1.0, 1.2}, 128, 32})));
  CHECK(q.interior.value < 2.0 - 1e-2);
  CHECK(q.enclosure.value > 2.0 + 1e-2);
}

TEST_CASE("pruned and threaded searches agree exactly with the exhaustive search") {
  std::vector<std::pair<FlowState, Weight>> cases{
      {state_of({CircleSpec{1.0}, 512}), Weight::mean_curvature},
      {state_of({EllipseSpec{2.0, 1.0}, 1024}), Weight::mean_curvature},
      {support_state({FourierSpec{{1.0, 0.0, 0.0, 0.3}, {}}, 512}), Weight::f_field},
      {state_of({SphereSpec{1.0}, 64, 32}), Weight::mean_curvature},
      {state_of({EllipsoidSpec{1.0, 1.5}, 64, 32}), Weight::mean_curvature},
      {state_of({TorusSpec{2.0, 0.5}, 64, 32}), Weight::mean_curvature}};
  auto same = [](const Extremum& a, const Extremum& b) {
    CHECK(a.value == b.value);
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
    CHECK(a.finite == b.finite);
    CHECK(a.present == b.present);
  };
  for (const auto& [st, w] : cases) {
    SampledHypersurface s = sample(st, w);
    Certificates ref = delta_certificates(s, {1, false});
    for (SearchOptions o : {SearchOptions{1, true}, SearchOptions{4, false}, SearchOptions{4, true}, SearchOptions{3, true}}) {
      Certificates c = delta_certificates(s, o);
      same(c.interior, ref.interior);
      same(c.exterior, ref.exterior);
      same(c.enclosure, ref.enclosure);
    }
    same(interior_delta_star(s, {2, true}), ref.interior);
    same(exterior_delta_star(s, {2, true}), ref.exterior);
    same(enclosure_delta(s, {2, true}), ref.enclosure);
  }
}

TEST_CASE("certify: shrinking circle keeps delta* = enclosure = 1; ellipse verdicts pass") {
  EvolveOptions o;
  o.t_end = 0.4;
  o.snapshot_interval = 0.1;
  Trajectory circle = evolve(build({CircleSpec{1.0}, 256}), o);
  Certification c = certify(circle.snapshots);
  REQUIRE(c.reports.size() == 5);
  for (const auto& r : c.reports) {
    CHECK(std::abs(r.interior.value - 1.0) <= 1e-4);
    CHECK(std::abs(r.enclosure.value - 1.0) <= 1e-4);
    CHECK_FALSE(r.exterior.finite);
    CHECK_FALSE(r.pinch_min_exterior.has_value());
    CHECK(r.r_out / r.r_in == doctest::Approx(1.0).epsilon(1e-3));
  }
  CHECK(c.interior.passed);
  CHECK(c.enclosure.passed);
  CHECK(c.exterior.passed);

  o.t_end = 0.8;
  Trajectory ell = evolve(build({EllipseSpec{2.0, 1.0}, 256}), o);
  Certification e = certify(ell.snapshots, {{{2, true}}, 1e-3});
  REQUIRE(e.reports.size() == 9);
  CHECK(e.interior.passed);
  CHECK(e.enclosure.passed);
  CHECK(e.interior.compared == 8);
  CHECK(e.reports.back().interior.value > e.reports.front().interior.value);
  CHECK(e.reports.back().enclosure.value < e.reports.front().enclosure.value);
  CHECK_THROWS_AS(certify({}), std::invalid_argument);
}

TEST_CASE("verdicts: decreases beyond the slack fail; exterior inf -> finite is a violation") {
  auto rep = [](double t, double in, double ext, double enc) {
    NoncollapseReport r;
    r.t = t;
    r.interior.value = in;
    r.exterior.value = ext;
    r.exterior.finite = std::isfinite(ext);
    r.enclosure.value = enc;
    return r;
  };
  Certification ok = verdicts({rep(0, 0.5, INFINITY, 3.0), rep(1, 0.5004, INFINITY, 2.9), rep(2, 0.5, INFINITY, 2.9)}, 1e-3);
  CHECK(ok.interior.passed);
  CHECK(ok.enclosure.passed);
  Certification bad = verdicts({rep(0, 0.5, INFINITY, 3.0), rep(1, 0.49, 1.0, 3.1)}, 1e-3);
  CHECK_FALSE(bad.interior.passed);
  CHECK(bad.interior.worst_violation == doctest::Approx(0.01 - 1.5e-3));
  CHECK_FALSE(bad.exterior.passed);
  CHECK_FALSE(bad.enclosure.passed);
  Certification cut = verdicts({rep(0, 0.5, INFINITY, 3.0), rep(1, 0.49, 1.0, 3.1)}, 1e-3, 0.5);
  CHECK(cut.interior.passed);
  CHECK(cut.interior.compared == 0);
}
