#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "nclab/geometry.hpp"

namespace nclab {

namespace {

double segment_distance2(const Vec2& p, const Vec2& a, const Vec2& b) {
  Vec2 ab = b - a;
  double len2 = norm2(ab);
  double t = len2 > 0.0 ? std::clamp(dot(p - a, ab) / len2, 0.0, 1.0) : 0.0;
  return norm2(p - (a + ab * t));
}

// Crossing-number test against a closed polygon.
bool inside_polygon(const Vec2& p, std::span<const Vec2> poly) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[j];
    if ((a.y > p.y) != (b.y > p.y)) {
      double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
      if (p.x < x) inside = !inside;
    }
  }
  return inside;
}

// Closed polygon bounding the region in the plane (curves) or in the
// meridian plane (surfaces, mirrored across the axis for sphere type).
std::vector<Vec2> region_polygon(const Geometry& g) {
  const auto& v = vertices(g);
  const auto* s = std::get_if<AxisymmetricSurface>(&g);
  if (!s || s->topology == ProfileTopology::torus) return v;
  std::vector<Vec2> poly(v);
  for (std::size_t i = v.size() - 2; i >= 1; --i) poly.push_back({-v[i].x, v[i].y});
  return poly;
}

struct RegionQuery {
  std::vector<Vec2> poly;
  const std::vector<Vec2>* boundary;
  bool closed;
  bool surface;

  explicit RegionQuery(const Geometry& g)
      : poly(region_polygon(g)),
        boundary(&vertices(g)),
        closed(std::holds_alternative<DiscreteCurve>(g) ||
               std::get<AxisymmetricSurface>(g).topology == ProfileTopology::torus),
        surface(std::holds_alternative<AxisymmetricSurface>(g)) {}

  // Signed distance for a point already reduced to the plane.
  double planar(const Vec2& q) const {
    const auto& v = *boundary;
    const std::size_t n = v.size();
    const std::size_t segs = closed ? n : n - 1;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < segs; ++i) best = std::min(best, segment_distance2(q, v[i], v[(i + 1) % n]));
    double d = std::sqrt(best);
    return inside_polygon(q, poly) ? d : -d;
  }

  Vec2 reduce(const Vec3& p) const {
    if (!surface) return {p.x, p.y};
    return {std::hypot(p.x, p.y), p.z};
  }
};

Vec2 circle_from(const Vec2& a, const Vec2& b) { return (a + b) * 0.5; }

bool circle_from(const Vec2& a, const Vec2& b, const Vec2& c, Vec2& centre) {
  Vec2 ab = b - a, ac = c - a;
  double d = 2.0 * cross(ab, ac);
  if (std::abs(d) < 1e-300) return false;
  double ab2 = norm2(ab), ac2 = norm2(ac);
  centre = a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
  return true;
}

}  // namespace

double region_distance(const Geometry& g, const Vec3& point) {
  RegionQuery q(g);
  return q.planar(q.reduce(point));
}

std::pair<Vec2, double> min_enclosing_circle(std::span<const Vec2> input) {
  std::vector<Vec2> pts(input.begin(), input.end());
  std::mt19937 rng(20240917u);
  std::shuffle(pts.begin(), pts.end(), rng);
  const double eps = 1e-12;
  Vec2 c = pts.empty() ? Vec2{} : pts[0];
  double r2 = 0.0;
  auto contains = [&](const Vec2& p) { return norm2(p - c) <= r2 * (1.0 + eps) + 1e-300; };
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (contains(pts[i])) continue;
    c = pts[i];
    r2 = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      if (contains(pts[j])) continue;
      c = circle_from(pts[i], pts[j]);
      r2 = norm2(pts[i] - c);
      for (std::size_t k = 0; k < j; ++k) {
        if (contains(pts[k])) continue;
        Vec2 cc;
        if (circle_from(pts[i], pts[j], pts[k], cc)) {
          c = cc;
          r2 = norm2(pts[i] - c);
        } else {
          // Collinear: the two farthest points span the circle.
          const Vec2* cand[3] = {&pts[i], &pts[j], &pts[k]};
          double best = -1.0;
          for (int a = 0; a < 3; ++a)
            for (int b = a + 1; b < 3; ++b)
              if (double d = norm2(*cand[a] - *cand[b]); d > best) {
                best = d;
                c = circle_from(*cand[a], *cand[b]);
              }
          r2 = best / 4.0;
        }
      }
    }
  }
  return {c, std::sqrt(r2)};
}

Radii inradius_circumradius(const Geometry& g) {
  RegionQuery q(g);
  const auto& v = vertices(g);
  const bool surface = std::holds_alternative<AxisymmetricSurface>(g);
  Radii out;

  // Circumradius: for surfaces the mirrored meridian point set has the same
  // minimal enclosing ball, centred on the axis by symmetry.
  std::vector<Vec2> pts(v);
  if (surface)
    for (const Vec2& p : v) pts.push_back({-p.x, p.y});
  auto [centre, radius] = min_enclosing_circle(pts);
  out.r_out = radius;
  out.out_center = surface ? Vec3{0.0, 0.0, centre.y} : Vec3{centre.x, centre.y, 0.0};

  // Inradius: multi-start grid search on the signed distance, refined by a
  // compass search.
  Vec2 lo{INFINITY, INFINITY}, hi{-INFINITY, -INFINITY};
  for (const Vec2& p : v) {
    lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
    hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
  }
  if (surface) lo.x = 0.0;
  const int grid = 40;
  const double cell = std::max(hi.x - lo.x, hi.y - lo.y) / grid;
  const int gx = std::max(1, int(std::ceil((hi.x - lo.x) / cell))), gy = std::max(1, int(std::ceil((hi.y - lo.y) / cell)));
  std::vector<std::pair<double, Vec2>> samples;
  for (int i = 0; i <= gx; ++i)
    for (int j = 0; j <= gy; ++j) {
      Vec2 p{lo.x + (hi.x - lo.x) * i / gx, lo.y + (hi.y - lo.y) * j / gy};
      samples.push_back({q.planar(p), p});
    }
  std::sort(samples.begin(), samples.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second.x != b.second.x ? a.second.x < b.second.x : a.second.y < b.second.y;
  });

  const double scale = std::max(hi.x - lo.x, hi.y - lo.y);
  const int starts = std::min<int>(6, int(samples.size()));
  double best = -INFINITY;
  Vec2 best_p;
  const Vec2 dirs[8] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {M_SQRT1_2, M_SQRT1_2}, {-M_SQRT1_2, M_SQRT1_2},
                        {M_SQRT1_2, -M_SQRT1_2}, {-M_SQRT1_2, -M_SQRT1_2}};
  for (int s = 0; s < starts; ++s) {
    Vec2 p = samples[s].second;
    double val = samples[s].first;
    double step = cell;
    while (step > 1e-13 * scale) {
      bool moved = false;
      for (const Vec2& d : dirs) {
        Vec2 trial = p + d * step;
        if (surface && trial.x < 0.0) trial.x = 0.0;
        double tv = q.planar(trial);
        if (tv > val) {
          val = tv;
          p = trial;
          moved = true;
        }
      }
      if (!moved) step *= 0.5;
    }
    if (val > best) {
      best = val;
      best_p = p;
    }
  }
  out.r_in = std::max(best, 0.0);
  out.in_center = surface ? Vec3{best_p.x, 0.0, best_p.y} : Vec3{best_p.x, best_p.y, 0.0};
  return out;
}

}  // namespace nclab
