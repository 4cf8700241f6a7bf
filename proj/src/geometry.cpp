#include "nclab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace nclab {

SelfIntersectionError::SelfIntersectionError(std::size_t a, std::size_t b)
    : GeometryError("self-intersecting geometry: segment " + std::to_string(a) + " crosses segment " +
                    std::to_string(b)),
      first(a),
      second(b) {}

DegenerateSpacingError::DegenerateSpacingError(std::size_t v)
    : GeometryError("degenerate spacing: vertex " + std::to_string(v) + " coincides with a neighbour"), vertex(v) {}

int dimension(const Geometry& g) { return std::holds_alternative<DiscreteCurve>(g) ? 1 : 2; }

const std::vector<Vec2>& vertices(const Geometry& g) {
  if (const auto* c = std::get_if<DiscreteCurve>(&g)) return c->vertices;
  return std::get<AxisymmetricSurface>(g).profile;
}

std::size_t vertex_count(const Geometry& g) { return vertices(g).size(); }

double VertexFields::k_min(std::size_t i) const {
  return dim == 1 ? kappa[i] : std::min(kappa[i], kappa_az[i]);
}

double VertexFields::k_max(std::size_t i) const {
  return dim == 1 ? kappa[i] : std::max(kappa[i], kappa_az[i]);
}

namespace {

bool is_closed(const Geometry& g) {
  if (std::holds_alternative<DiscreteCurve>(g)) return true;
  return std::get<AxisymmetricSurface>(g).topology == ProfileTopology::torus;
}

double signed_area(std::span<const Vec2> pts) {
  double a = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) a += cross(pts[i], pts[(i + 1) % pts.size()]);
  return 0.5 * a;
}

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
         p.y <= std::max(a.y, b.y);
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  int o1 = orientation(p1, p2, q1), o2 = orientation(p1, p2, q2);
  int o3 = orientation(q1, q2, p1), o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

std::vector<Vec2> sample_analytic_plane(const AnalyticSurface& s, int count) {
  std::vector<Vec2> out;
  out.reserve(count);
  for (const Param& p : s.profile_params(count)) {
    Vec3 x = s.position(p);
    // Profiles live in the (r, z) half-plane: the v = 0 meridian is the x-z plane.
    out.push_back(s.dim() == 1 ? Vec2{x.x, x.y} : Vec2{x.x, x.z});
  }
  return out;
}

}  // namespace

// Declared in remesh.cpp.
std::vector<Vec2> resample_points(std::span<const Vec2> pts, bool closed_curve, std::size_t count,
                                  std::vector<std::vector<double>*> carried);

std::optional<AnalyticSurface> analytic_shape(const ShapeSpec& spec) {
  struct Visitor {
    std::optional<AnalyticSurface> operator()(const CircleSpec& s) const { return AnalyticSurface::circle(s.radius); }
    std::optional<AnalyticSurface> operator()(const EllipseSpec& s) const {
      return AnalyticSurface::ellipse(s.a, s.b);
    }
    std::optional<AnalyticSurface> operator()(const FourierSpec& s) const {
      if (s.cos.size() > 9 || s.sin.size() > 9) throw GeometryError("fourier descriptor: at most 9 coefficients");
      FourierShape f;
      std::copy(s.cos.begin(), s.cos.end(), f.cos_coeffs.begin());
      std::copy(s.sin.begin(), s.sin.end(), f.sin_coeffs.begin());
      return AnalyticSurface(f);
    }
    std::optional<AnalyticSurface> operator()(const PolygonSpec&) const { return std::nullopt; }
    std::optional<AnalyticSurface> operator()(const SphereSpec& s) const { return AnalyticSurface::sphere(s.radius); }
    std::optional<AnalyticSurface> operator()(const EllipsoidSpec& s) const {
      return AnalyticSurface::ellipsoid(s.a, s.c);
    }
    std::optional<AnalyticSurface> operator()(const TorusSpec& s) const {
      return AnalyticSurface::torus(s.major, s.minor);
    }
    std::optional<AnalyticSurface> operator()(const ProfileSpec&) const { return std::nullopt; }
  };
  return std::visit(Visitor{}, spec);
}

Geometry build(const ShapeDescriptor& d) {
  const int n = d.resolution;
  Geometry out;
  if (const auto* c = std::get_if<CircleSpec>(&d.shape)) {
    if (!(c->radius > 0.0)) throw GeometryError("circle radius must be positive");
    if (n < 8) throw GeometryError("resolution must be at least 8");
    DiscreteCurve curve;
    for (int k = 0; k < n; ++k) {
      double a = 2.0 * kPi * k / n;
      curve.vertices.push_back({c->radius * std::cos(a), c->radius * std::sin(a)});
    }
    out = curve;
  } else if (std::holds_alternative<EllipseSpec>(d.shape) || std::holds_alternative<FourierSpec>(d.shape)) {
    if (const auto* e = std::get_if<EllipseSpec>(&d.shape); e && !(e->a > 0.0 && e->b > 0.0))
      throw GeometryError("ellipse semi-axes must be positive");
    if (n < 8) throw GeometryError("resolution must be at least 8");
    AnalyticSurface s = *analytic_shape(d.shape);
    if (const auto* f = std::get_if<FourierSpec>(&d.shape)) {
      // A polar graph needs r > 0; check densely before sampling.
      const auto& fs = std::get<FourierShape>(s.shape());
      for (int k = 0; k < 4096; ++k)
        if (!(fs.radius(2.0 * kPi * k / 4096) > 0.0)) throw GeometryError("fourier descriptor: r(theta) must be positive");
      (void)f;
    }
    out = DiscreteCurve{sample_analytic_plane(s, n)};
  } else if (const auto* p = std::get_if<PolygonSpec>(&d.shape)) {
    std::vector<Vec2> pts = p->points;
    if (pts.size() < 3) throw GeometryError("polygon needs at least 3 points");
    if (auto hit = find_self_intersection(pts, true)) throw SelfIntersectionError(hit->first, hit->second);
    if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
    if (n > 0) pts = resample_points(pts, true, std::size_t(n), {});
    out = DiscreteCurve{pts};
  } else if (std::holds_alternative<SphereSpec>(d.shape) || std::holds_alternative<EllipsoidSpec>(d.shape) ||
             std::holds_alternative<TorusSpec>(d.shape)) {
    if (n < 8) throw GeometryError("resolution must be at least 8");
    AnalyticSurface s = *analytic_shape(d.shape);
    if (const auto* t = std::get_if<TorusSpec>(&d.shape); t && !(t->minor > 0.0 && t->major > t->minor))
      throw GeometryError("torus needs 0 < minor < major");
    AxisymmetricSurface surf;
    surf.profile = sample_analytic_plane(s, n);
    surf.topology = std::holds_alternative<TorusSpec>(d.shape) ? ProfileTopology::torus : ProfileTopology::sphere;
    if (surf.topology == ProfileTopology::sphere) {
      surf.profile.front().x = 0.0;
      surf.profile.back().x = 0.0;
    }
    surf.azimuthal_samples = d.azimuthal_samples;
    out = surf;
  } else {
    const auto& ps = std::get<ProfileSpec>(d.shape);
    std::vector<Vec2> pts = ps.points;
    if (pts.size() < 3) throw GeometryError("profile needs at least 3 points");
    AxisymmetricSurface surf;
    surf.topology = ps.topology;
    surf.azimuthal_samples = d.azimuthal_samples;
    if (ps.topology == ProfileTopology::sphere) {
      if (pts.front().y > pts.back().y) std::reverse(pts.begin(), pts.end());
      if (std::abs(pts.front().x) > 1e-12 || std::abs(pts.back().x) > 1e-12)
        throw GeometryError("sphere-type profile must start and end on the axis r = 0");
      pts.front().x = 0.0;
      pts.back().x = 0.0;
      if (auto hit = find_self_intersection(pts, false)) throw SelfIntersectionError(hit->first, hit->second);
      if (n > 0) pts = resample_points(pts, false, std::size_t(n), {});
    } else {
      if (auto hit = find_self_intersection(pts, true)) throw SelfIntersectionError(hit->first, hit->second);
      if (signed_area(pts) < 0.0) std::reverse(pts.begin(), pts.end());
      if (n > 0) pts = resample_points(pts, true, std::size_t(n), {});
    }
    surf.profile = std::move(pts);
    out = surf;
  }
  validate(out);
  return out;
}

void validate(const Geometry& g) {
  const auto& v = vertices(g);
  const std::size_t n = v.size();
  if (n < 8) throw GeometryError("geometry needs at least 8 vertices, got " + std::to_string(n));
  for (const Vec2& p : v)
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw GeometryError("non-finite vertex coordinate");

  const bool closed = is_closed(g);
  Spacing sp = spacing(g);
  if (!(sp.min > 0.0)) {
    const std::size_t segs = closed ? n : n - 1;
    for (std::size_t i = 0; i < segs; ++i)
      if (norm(v[(i + 1) % n] - v[i]) == 0.0) throw DegenerateSpacingError(i);
  }
  if (sp.min < 0.2 * sp.mean || sp.max > 5.0 * sp.mean)
    throw GeometryError("vertex spacing outside [0.2, 5] x mean spacing");
  if (auto hit = find_self_intersection(v, closed)) throw SelfIntersectionError(hit->first, hit->second);

  if (std::holds_alternative<DiscreteCurve>(g)) {
    if (!(signed_area(v) > 0.0)) throw GeometryError("curve must be counterclockwise (positive signed area)");
    return;
  }
  const auto& s = std::get<AxisymmetricSurface>(g);
  if (s.azimuthal_samples < 3) throw GeometryError("need at least 3 azimuthal samples");
  if (s.topology == ProfileTopology::torus) {
    for (const Vec2& p : v)
      if (!(p.x > 0.0)) throw GeometryError("torus-type profile must stay off the axis");
    if (!(signed_area(v) > 0.0)) throw GeometryError("torus-type profile must be counterclockwise");
    return;
  }
  if (v.front().x != 0.0 || v.back().x != 0.0) throw GeometryError("sphere-type profile must end on the axis");
  for (std::size_t i = 1; i + 1 < n; ++i)
    if (!(v[i].x > 0.0)) throw GeometryError("sphere-type profile touches the axis at interior vertex " + std::to_string(i));
  if (!(v.front().y < v.back().y)) throw GeometryError("sphere-type profile must run from south to north pole");
  auto axis_angle_ok = [](const Vec2& e) { return std::abs(e.x) > 0.9 * norm(e); };
  if (!axis_angle_ok(v[1] - v[0]) || !axis_angle_ok(v[n - 1] - v[n - 2]))
    throw GeometryError("sphere-type profile must meet the axis orthogonally");
}

Spacing spacing(const Geometry& g) {
  const auto& v = vertices(g);
  const bool closed = is_closed(g);
  const std::size_t segs = closed ? v.size() : v.size() - 1;
  Spacing s;
  s.min = INFINITY;
  s.max = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < segs; ++i) {
    double l = norm(v[(i + 1) % v.size()] - v[i]);
    s.min = std::min(s.min, l);
    s.max = std::max(s.max, l);
    total += l;
  }
  s.mean = total / double(segs);
  return s;
}

Measures measures(const Geometry& g) {
  Measures m;
  const auto& v = vertices(g);
  const std::size_t n = v.size();
  if (std::holds_alternative<DiscreteCurve>(g)) {
    for (std::size_t i = 0; i < n; ++i) m.boundary += norm(v[(i + 1) % n] - v[i]);
    m.enclosed = signed_area(v);
    m.isoperimetric_ratio = m.boundary * m.boundary / (4.0 * kPi * m.enclosed);
    m.equivalent_radius = std::sqrt(m.enclosed / kPi);
    return m;
  }
  const bool closed = is_closed(g);
  const std::size_t segs = closed ? n : n - 1;
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec2& a = v[i];
    const Vec2& b = v[(i + 1) % n];
    m.boundary += kPi * (a.x + b.x) * norm(b - a);
    m.enclosed += kPi / 3.0 * (b.y - a.y) * (a.x * a.x + a.x * b.x + b.x * b.x);
  }
  m.isoperimetric_ratio = m.boundary * m.boundary * m.boundary / (36.0 * kPi * m.enclosed * m.enclosed);
  m.equivalent_radius = std::cbrt(3.0 * m.enclosed / (4.0 * kPi));
  return m;
}

std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(std::span<const Vec2> pts, bool closed) {
  const std::size_t n = pts.size();
  const std::size_t segs = closed ? n : n - 1;
  // Axis-aligned boxes first; the exact predicate only on overlapping boxes.
  std::vector<Vec2> lo(segs), hi(segs);
  for (std::size_t i = 0; i < segs; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    lo[i] = {std::min(a.x, b.x), std::min(a.y, b.y)};
    hi[i] = {std::max(a.x, b.x), std::max(a.y, b.y)};
  }
  for (std::size_t i = 0; i < segs; ++i) {
    for (std::size_t j = i + 2; j < segs; ++j) {
      if (closed && i == 0 && j == segs - 1) continue;  // adjacent through the wrap
      if (lo[j].x > hi[i].x || hi[j].x < lo[i].x || lo[j].y > hi[i].y || hi[j].y < lo[i].y) continue;
      if (segments_intersect(pts[i], pts[(i + 1) % n], pts[j], pts[(j + 1) % n])) return std::make_pair(i, j);
    }
  }
  return std::nullopt;
}

void write_geometry(std::ostream& os, const Geometry& g) {
  char buf[64];
  const auto& v = vertices(g);
  if (std::holds_alternative<DiscreteCurve>(g)) {
    os << "nclab-geometry curve " << v.size() << "\n";
  } else {
    const auto& s = std::get<AxisymmetricSurface>(g);
    os << "nclab-geometry axisymmetric " << (s.topology == ProfileTopology::sphere ? "sphere" : "torus") << ' '
       << v.size() << ' ' << s.azimuthal_samples << "\n";
  }
  for (const Vec2& p : v) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", p.x, p.y);
    os << buf;
  }
}

Geometry read_geometry(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw GeometryError("geometry file: missing header");
  std::istringstream header(line);
  std::string magic, kind;
  header >> magic >> kind;
  if (magic != "nclab-geometry") throw GeometryError("geometry file: bad header '" + line + "'");
  std::size_t count = 0;
  Geometry out;
  std::vector<Vec2>* dst = nullptr;
  if (kind == "curve") {
    if (!(header >> count)) throw GeometryError("geometry file: missing vertex count");
    out = DiscreteCurve{};
    dst = &std::get<DiscreteCurve>(out).vertices;
  } else if (kind == "axisymmetric") {
    std::string topo;
    AxisymmetricSurface s;
    if (!(header >> topo >> count >> s.azimuthal_samples)) throw GeometryError("geometry file: bad axisymmetric header");
    if (topo == "sphere") s.topology = ProfileTopology::sphere;
    else if (topo == "torus") s.topology = ProfileTopology::torus;
    else throw GeometryError("geometry file: unknown topology '" + topo + "'");
    out = s;
    dst = &std::get<AxisymmetricSurface>(out).profile;
  } else {
    throw GeometryError("geometry file: unknown kind '" + kind + "'");
  }
  dst->reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(is, line)) throw GeometryError("geometry file: expected " + std::to_string(count) + " vertices");
    std::istringstream row(line);
    Vec2 p;
    if (!(row >> p.x >> p.y)) throw GeometryError("geometry file: bad vertex line " + std::to_string(i + 2));
    dst->push_back(p);
  }
  return out;
}

}  // namespace nclab
