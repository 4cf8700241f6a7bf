#pragma once

// Discrete hypersurfaces: closed plane polygons and axisymmetric surfaces
// given by a meridian profile. Values are immutable snapshots; every function
// here is pure.

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nclab/analytic.hpp"
#include "nclab/vec.hpp"

namespace nclab {

class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two non-adjacent segments cross; indices are the segments' first vertices.
class SelfIntersectionError : public GeometryError {
 public:
  SelfIntersectionError(std::size_t first, std::size_t second);
  std::size_t first, second;
};

/// Two consecutive vertices coincide.
class DegenerateSpacingError : public GeometryError {
 public:
  explicit DegenerateSpacingError(std::size_t vertex);
  std::size_t vertex;
};

/// Closed counterclockwise polygon in the plane.
struct DiscreteCurve {
  std::vector<Vec2> vertices;
};

enum class ProfileTopology {
  sphere,  // open profile from the south pole to the north pole, both on r = 0
  torus,   // closed profile with r > 0
};

/// Surface of revolution about the z-axis given by its meridian profile (r, z).
struct AxisymmetricSurface {
  std::vector<Vec2> profile;  // x = r, y = z
  ProfileTopology topology = ProfileTopology::sphere;
  int azimuthal_samples = 64;
};

using Geometry = std::variant<DiscreteCurve, AxisymmetricSurface>;

/// Intrinsic dimension n of the hypersurface (1 for curves, 2 for surfaces).
int dimension(const Geometry& g);
std::size_t vertex_count(const Geometry& g);
const std::vector<Vec2>& vertices(const Geometry& g);

/// Per-vertex geometric fields. For surfaces everything refers to profile
/// vertices; the azimuthal direction is implied by symmetry.
struct VertexFields {
  int dim = 1;
  std::vector<Vec2> normal;      // outward unit normal in the plane / meridian half-plane
  std::vector<Vec2> tangent;     // unit tangent in traversal direction
  std::vector<double> kappa;     // curve curvature, or profile (meridian) curvature
  std::vector<double> kappa_az;  // azimuthal curvature (surfaces only)
  std::vector<double> H;
  std::vector<double> norm_A2;
  std::vector<double> grad_H;    // dH/ds along the tangent
  std::vector<double> lap_H;
  std::vector<double> f;         // optional transported scalar; empty when unused

  double k_min(std::size_t i) const;
  double k_max(std::size_t i) const;
};

// ---------------------------------------------------------------------------
// Shape descriptors

struct CircleSpec { double radius = 1.0; };
struct EllipseSpec { double a = 2.0, b = 1.0; };
/// r(theta) = sum_k cos[k] cos(k theta) + sin[k] sin(k theta), k = 0..8.
struct FourierSpec { std::vector<double> cos, sin; };
struct PolygonSpec { std::vector<Vec2> points; };
struct SphereSpec { double radius = 1.0; };
struct EllipsoidSpec { double a = 1.0, c = 1.0; };
struct TorusSpec { double major = 2.0, minor = 0.5; };
struct ProfileSpec { std::vector<Vec2> points; ProfileTopology topology = ProfileTopology::sphere; };

using ShapeSpec = std::variant<CircleSpec, EllipseSpec, FourierSpec, PolygonSpec, SphereSpec, EllipsoidSpec,
                               TorusSpec, ProfileSpec>;

struct ShapeDescriptor {
  ShapeSpec shape = CircleSpec{};
  int resolution = 256;         // curve vertices or profile vertices; 0 keeps point lists as given
  int azimuthal_samples = 64;
};

/// Exact parametrization behind an analytic descriptor, if there is one.
std::optional<AnalyticSurface> analytic_shape(const ShapeSpec& spec);

/// Discretize a descriptor with vertices near-uniformly spaced by arclength.
Geometry build(const ShapeDescriptor& descriptor);

/// Throws if the geometry breaks its type invariants.
void validate(const Geometry& g);

VertexFields compute_fields(const Geometry& g);

/// Laplace-Beltrami of a per-vertex scalar (arclength second difference on
/// curves, axisymmetric Laplacian on profiles).
std::vector<double> laplacian(const Geometry& g, std::span<const double> values);

/// Derivative of a per-vertex scalar along the curve / meridian arclength.
std::vector<double> arclength_derivative(const Geometry& g, std::span<const double> values);

// ---------------------------------------------------------------------------
// Region queries

/// Signed distance from a point to the discretized hypersurface, positive
/// inside the enclosed region. For surfaces the point is reduced to the
/// meridian half-plane.
double region_distance(const Geometry& g, const Vec3& point);

struct Radii {
  double r_in = 0.0;
  double r_out = 0.0;
  Vec3 in_center;
  Vec3 out_center;
};

Radii inradius_circumradius(const Geometry& g);

/// Smallest enclosing circle of a planar point set.
std::pair<Vec2, double> min_enclosing_circle(std::span<const Vec2> points);

// ---------------------------------------------------------------------------
// Measures

struct Measures {
  double boundary = 0.0;  // length of a curve, area of a surface
  double enclosed = 0.0;  // enclosed area of a curve, volume of a surface
  double isoperimetric_ratio = 0.0;  // L^2 / (4 pi A) or S^3 / (36 pi V^2); 1 on round shapes
  double equivalent_radius = 0.0;    // radius of the round shape with the same enclosed measure
};

Measures measures(const Geometry& g);

struct Spacing {
  double min = 0.0, max = 0.0, mean = 0.0;
};

Spacing spacing(const Geometry& g);

/// First crossing pair of non-adjacent segments, if any.
std::optional<std::pair<std::size_t, std::size_t>> find_self_intersection(std::span<const Vec2> points, bool closed);

// ---------------------------------------------------------------------------
// Remeshing

/// Resample to uniform arclength along a periodic cubic spline through the
/// vertices, starting at vertex 0 (and keeping the poles), then offset
/// uniformly along the normal so the enclosed area (volume) is unchanged.
/// Each scalar in `carried` is interpolated onto the new vertices. Vertex
/// count is unchanged.
Geometry remesh(const Geometry& g, std::vector<std::vector<double>*> carried = {});

// ---------------------------------------------------------------------------
// Plain-text import/export: a header line, then one vertex per line.

void write_geometry(std::ostream& os, const Geometry& g);
Geometry read_geometry(std::istream& is);

}  // namespace nclab
