#include <algorithm>
#include <cmath>

#include "nclab/geometry.hpp"
#include "nclab/spline.hpp"

namespace nclab {

namespace {

constexpr double kGL5Nodes[5] = {0.0, -0.5384693101056831, 0.5384693101056831, -0.9061798459386640,
                                 0.9061798459386640};
constexpr double kGL5Weights[5] = {0.5688888888888889, 0.4786286704993665, 0.4786286704993665,
                                   0.2369268850561891, 0.2369268850561891};

struct SplineCurve {
  PeriodicSpline x, y;

  double speed(double s) const { return std::hypot(x.derivative(s), y.derivative(s)); }

  double length(double a, double b) const {
    double mid = 0.5 * (a + b), half = 0.5 * (b - a), sum = 0.0;
    for (int k = 0; k < 5; ++k) sum += kGL5Weights[k] * speed(mid + half * kGL5Nodes[k]);
    return sum * half;
  }
};

// Parameter values with uniform spline arclength between knots lo and hi
// (indices into `knots`, hi may equal knots.size() meaning the period end).
std::vector<double> uniform_parameters(const SplineCurve& c, const std::vector<double>& knots, double period,
                                       std::size_t lo, std::size_t hi, std::size_t intervals) {
  auto knot = [&](std::size_t i) { return i < knots.size() ? knots[i] : period; };
  std::vector<double> cum(hi - lo + 1, 0.0);
  for (std::size_t i = lo; i < hi; ++i) cum[i - lo + 1] = cum[i - lo] + c.length(knot(i), knot(i + 1));
  const double total = cum.back();
  std::vector<double> out;
  out.reserve(intervals + 1);
  for (std::size_t j = 0; j <= intervals; ++j) {
    double target = total * double(j) / double(intervals);
    if (j == 0) { out.push_back(knot(lo)); continue; }
    if (j == intervals) { out.push_back(knot(hi)); continue; }
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    std::size_t seg = std::min<std::size_t>(std::size_t(std::max<std::ptrdiff_t>(it - cum.begin() - 1, 0)), hi - lo - 1);
    double a = knot(lo + seg), b = knot(lo + seg + 1);
    double want = target - cum[seg];
    double s = a + (b - a) * want / std::max(cum[seg + 1] - cum[seg], 1e-300);
    for (int iter = 0; iter < 20; ++iter) {
      double step = (c.length(a, s) - want) / c.speed(s);
      s = std::clamp(s - step, a, b);
      if (std::abs(step) < 1e-15 * (b - a + 1.0)) break;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<double> chord_knots(std::span<const Vec2> pts, double& period) {
  std::vector<double> knots(pts.size());
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    knots[i] = s;
    s += norm(pts[(i + 1) % pts.size()] - pts[i]);
  }
  period = s;
  return knots;
}

std::vector<double> coords(std::span<const Vec2> pts, bool want_x) {
  std::vector<double> out(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = want_x ? pts[i].x : pts[i].y;
  return out;
}

}  // namespace

/// Resample a closed curve (closed_curve = true) or a sphere-type profile
/// (false; ends on the axis) to `count` vertices uniform in spline arclength.
std::vector<Vec2> resample_points(std::span<const Vec2> pts, bool closed_curve, std::size_t count,
                                  std::vector<std::vector<double>*> carried) {
  std::vector<Vec2> loop(pts.begin(), pts.end());
  std::vector<std::vector<double>> carried_loop;
  for (auto* c : carried) carried_loop.push_back(*c);
  const std::size_t n = pts.size();
  if (!closed_curve) {
    // Close the meridian by mirroring across the axis; the spline is then
    // symmetric and meets the axis orthogonally.
    for (std::size_t i = n - 2; i >= 1; --i) loop.push_back({-pts[i].x, pts[i].y});
    for (std::size_t k = 0; k < carried.size(); ++k)
      for (std::size_t i = n - 2; i >= 1; --i) carried_loop[k].push_back((*carried[k])[i]);
  }
  double period = 0.0;
  std::vector<double> knots = chord_knots(loop, period);
  SplineCurve curve{PeriodicSpline(knots, coords(loop, true), period), PeriodicSpline(knots, coords(loop, false), period)};
  std::vector<PeriodicSpline> fields;
  for (auto& c : carried_loop) fields.emplace_back(knots, c, period);

  std::vector<double> params = closed_curve ? uniform_parameters(curve, knots, period, 0, loop.size(), count)
                                            : uniform_parameters(curve, knots, period, 0, n - 1, count - 1);
  if (closed_curve) params.pop_back();  // the period end duplicates vertex 0

  std::vector<Vec2> out;
  out.reserve(count);
  for (double s : params) out.push_back({curve.x(s), curve.y(s)});
  if (!closed_curve) {
    out.front() = {0.0, pts.front().y};
    out.back() = {0.0, pts.back().y};
  } else {
    out.front() = pts.front();
  }
  for (std::size_t k = 0; k < carried.size(); ++k) {
    std::vector<double> vals;
    vals.reserve(count);
    for (double s : params) vals.push_back(fields[k](s));
    vals.front() = (*carried[k]).front();
    if (!closed_curve) vals.back() = (*carried[k])[n - 1];
    *carried[k] = std::move(vals);
  }
  return out;
}

namespace {

// Uniform normal offset restoring the enclosed area (curves) or volume
// (surfaces); pole vertices stay on the axis.
void restore_enclosed(Geometry& g, double target) {
  for (int iter = 0; iter < 3; ++iter) {
    Measures m = measures(g);
    const double eps = (target - m.enclosed) / m.boundary;
    if (std::abs(eps) <= 1e-15 * std::sqrt(m.boundary)) return;
    VertexFields f = compute_fields(g);
    std::vector<Vec2>& v = std::holds_alternative<DiscreteCurve>(g) ? std::get<DiscreteCurve>(g).vertices
                                                                     : std::get<AxisymmetricSurface>(g).profile;
    for (std::size_t i = 0; i < v.size(); ++i) v[i] += f.normal[i] * eps;
    if (const auto* s = std::get_if<AxisymmetricSurface>(&g); s && s->topology == ProfileTopology::sphere) {
      v.front().x = 0.0;
      v.back().x = 0.0;
    }
  }
}

}  // namespace

Geometry remesh(const Geometry& g, std::vector<std::vector<double>*> carried) {
  const double target = measures(g).enclosed;
  Geometry out;
  if (const auto* c = std::get_if<DiscreteCurve>(&g)) {
    out = DiscreteCurve{resample_points(c->vertices, true, c->vertices.size(), carried)};
  } else {
    AxisymmetricSurface s = std::get<AxisymmetricSurface>(g);
    const bool closed = s.topology == ProfileTopology::torus;
    s.profile = resample_points(s.profile, closed, s.profile.size(), carried);
    out = s;
  }
  restore_enclosed(out, target);
  return out;
}

}  // namespace nclab
