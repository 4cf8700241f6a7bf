#pragma once

// Independent reference computations used by the tests. Nothing here calls
// into the library's numerical code; only plain value types are shared.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <vector>

#include "nclab/vec.hpp"

namespace oracle {

using nclab::Vec2;
using nclab::Vec3;

constexpr double pi = std::numbers::pi;

inline double shoelace(const std::vector<Vec2>& p) {
  double a = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const Vec2& u = p[i];
    const Vec2& v = p[(i + 1) % p.size()];
    a += u.x * v.y - v.x * u.y;
  }
  return 0.5 * a;
}

inline double segment_distance(Vec2 p, Vec2 a, Vec2 b) {
  const double dx = b.x - a.x, dy = b.y - a.y;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((p.x - a.x) * dx + (p.y - a.y) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p.x - (a.x + t * dx), p.y - (a.y + t * dy));
}

/// Winding number of a closed polygon around p.
inline int winding(const std::vector<Vec2>& poly, Vec2 p) {
  int w = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& a = poly[i];
    const Vec2& b = poly[(i + 1) % poly.size()];
    const double cross = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && cross > 0) ++w;
    } else if (b.y <= p.y && cross < 0) {
      --w;
    }
  }
  return w;
}

/// Signed distance to a closed polygon, positive inside.
inline double polygon_signed_distance(const std::vector<Vec2>& poly, Vec2 p) {
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < poly.size(); ++i) d = std::min(d, segment_distance(p, poly[i], poly[(i + 1) % poly.size()]));
  return winding(poly, p) != 0 ? d : -d;
}

// Ellipse x = a cos t, y = b sin t.
inline Vec2 ellipse_point(double a, double b, double t) { return {a * std::cos(t), b * std::sin(t)}; }
inline double ellipse_curvature(double a, double b, double t) {
  const double s = std::sin(t), c = std::cos(t);
  return a * b / std::pow(a * a * s * s + b * b * c * c, 1.5);
}
inline Vec2 ellipse_normal(double a, double b, double t) {
  Vec2 n{b * std::cos(t), a * std::sin(t)};
  return n / std::hypot(n.x, n.y);
}
/// Parameter of a point on the ellipse.
inline double ellipse_param(double a, double b, Vec2 p) { return std::atan2(p.y / b, p.x / a); }

// Polar graph r(theta) = 1 + eps cos(k theta).
struct Star {
  double eps = 0.3;
  int k = 3;
  double r(double t) const { return 1.0 + eps * std::cos(k * t); }
  double r1(double t) const { return -eps * k * std::sin(k * t); }
  double r2(double t) const { return -eps * k * k * std::cos(k * t); }
  Vec2 point(double t) const { return {r(t) * std::cos(t), r(t) * std::sin(t)}; }
  double curvature(double t) const {
    const double a = r(t), b = r1(t), c = r2(t);
    return (a * a + 2 * b * b - a * c) / std::pow(a * a + b * b, 1.5);
  }
  Vec2 normal(double t) const {
    // Tangent (x', y'), outward normal (y', -x') for counterclockwise traversal.
    const double a = r(t), b = r1(t);
    Vec2 tan{b * std::cos(t) - a * std::sin(t), b * std::sin(t) + a * std::cos(t)};
    Vec2 n{tan.y, -tan.x};
    return n / std::hypot(n.x, n.y);
  }
};

/// Richardson extrapolation of a sequence converging at order p in N doubling.
inline double richardson(double coarse, double fine, double p) {
  const double f = std::pow(2.0, p);
  return (f * fine - coarse) / (f - 1.0);
}

/// Brute-force pair extrema of the two-point function for a sampled curve
/// with exact data: returns {interior, exterior, enclosure}.
struct PairExtrema {
  double interior = std::numeric_limits<double>::infinity();
  double exterior = std::numeric_limits<double>::infinity();
  double enclosure = -std::numeric_limits<double>::infinity();
};

template <class P>
PairExtrema brute_pairs(const std::vector<P>& X, const std::vector<P>& nu, const std::vector<double>& w,
                        std::size_t base_count) {
  PairExtrema e;
  for (std::size_t x = 0; x < base_count; ++x)
    for (std::size_t y = 0; y < X.size(); ++y) {
      if (x == y) continue;
      const P c = X[y] - X[x];
      const double d2 = dot(c, c), inner = dot(c, nu[x]);
      if (inner < 0) {
        const double v = w[x] * d2 / (-2.0 * inner);
        e.interior = std::min(e.interior, v);
        e.enclosure = std::max(e.enclosure, v);
      } else if (inner > 0) {
        e.exterior = std::min(e.exterior, w[x] * d2 / (2.0 * inner));
      }
    }
  return e;
}

}  // namespace oracle
