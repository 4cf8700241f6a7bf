#pragma once

// Exact parametrized hypersurfaces: plane curves (n = 1) and surfaces of
// revolution (n = 2). Every derivative is exact up to rounding; it is obtained
// by forward-mode differentiation of the templated parametrizations below.
//
// Conventions shared with the discrete geometry:
//   * curves are traversed counterclockwise and nu is the clockwise rotation of
//     the unit tangent (outward);
//   * surfaces of revolution X(u, v) = (rho(u) cos v, rho(u) sin v, zeta(u))
//     have a profile traversed counterclockwise in the (r, z) half-plane, so the
//     outward normal is normalize(X_v x X_u);
//   * h_ij = -<d_i d_j X, nu>, positive on convex bodies; H = tr(g^-1 h).

#include <array>
#include <cmath>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "nclab/dual.hpp"
#include "nclab/vec.hpp"

namespace nclab {

inline constexpr double kPi = 3.14159265358979323846;

struct CircleShape {
  double radius = 1.0;
  static constexpr int dim = 1;
  template <class T>
  Vec3T<T> position(const T& u, const T& /*v*/) const {
    using std::cos; using std::sin;
    return {T(radius) * cos(u), T(radius) * sin(u), T(0.0)};
  }
};

struct EllipseShape {
  double a = 2.0, b = 1.0;
  static constexpr int dim = 1;
  template <class T>
  Vec3T<T> position(const T& u, const T& /*v*/) const {
    using std::cos; using std::sin;
    return {T(a) * cos(u), T(b) * sin(u), T(0.0)};
  }
};

/// Polar graph r(theta) = sum_k cos_k cos(k theta) + sin_k sin(k theta).
struct FourierShape {
  std::array<double, 9> cos_coeffs{};
  std::array<double, 9> sin_coeffs{};
  static constexpr int dim = 1;
  template <class T>
  T radius(const T& u) const {
    using std::cos; using std::sin;
    T r(cos_coeffs[0]);
    for (int k = 1; k < 9; ++k) {
      if (cos_coeffs[k] != 0.0) r = r + T(cos_coeffs[k]) * cos(T(double(k)) * u);
      if (sin_coeffs[k] != 0.0) r = r + T(sin_coeffs[k]) * sin(T(double(k)) * u);
    }
    return r;
  }
  template <class T>
  Vec3T<T> position(const T& u, const T& /*v*/) const {
    using std::cos; using std::sin;
    T r = radius(u);
    return {r * cos(u), r * sin(u), T(0.0)};
  }
};

/// Profile u in (0, pi) runs from the south pole to the north pole.
struct SphereShape {
  double radius = 1.0;
  static constexpr int dim = 2;
  template <class T> T rho(const T& u) const { using std::sin; return T(radius) * sin(u); }
  template <class T> T zeta(const T& u) const { using std::cos; return -T(radius) * cos(u); }
  template <class T>
  Vec3T<T> position(const T& u, const T& v) const {
    using std::cos; using std::sin;
    T r = rho(u);
    return {r * cos(v), r * sin(v), zeta(u)};
  }
};

/// Ellipsoid of revolution with equatorial semi-axis a and polar semi-axis c.
struct EllipsoidShape {
  double a = 1.0, c = 1.0;
  static constexpr int dim = 2;
  template <class T> T rho(const T& u) const { using std::sin; return T(a) * sin(u); }
  template <class T> T zeta(const T& u) const { using std::cos; return -T(c) * cos(u); }
  template <class T>
  Vec3T<T> position(const T& u, const T& v) const {
    using std::cos; using std::sin;
    T r = rho(u);
    return {r * cos(v), r * sin(v), zeta(u)};
  }
};

/// Torus with centre-line radius R0 and tube radius r0; u runs around the tube.
struct TorusShape {
  double major = 2.0, minor = 0.5;
  static constexpr int dim = 2;
  template <class T> T rho(const T& u) const { using std::cos; return T(major) + T(minor) * cos(u); }
  template <class T> T zeta(const T& u) const { using std::sin; return T(minor) * sin(u); }
  template <class T>
  Vec3T<T> position(const T& u, const T& v) const {
    using std::cos; using std::sin;
    T r = rho(u);
    return {r * cos(v), r * sin(v), zeta(u)};
  }
};

using ShapeVariant =
    std::variant<CircleShape, EllipseShape, FourierShape, SphereShape, EllipsoidShape, TorusShape>;

/// Parameter point. For curves only u is used.
struct Param {
  double u = 0.0;
  double v = 0.0;
};

// ---------------------------------------------------------------------------
// Generic differential geometry over a scalar type S.

template <class S>
struct SurfaceJet {
  int dim = 1;
  Vec3T<S> X;
  Vec3T<S> dX[2];
  Vec3T<S> ddX[2][2];
};

template <class S>
struct LocalGeometryT {
  int dim = 1;
  Vec3T<S> X;
  Vec3T<S> dX[2];
  Vec3T<S> ddX[2][2];
  Vec3T<S> nu;
  S g[2][2]{};
  S g_inv[2][2]{};
  S h[2][2]{};
  S H{};
};

namespace detail {

template <class S>
Dual<Dual<S>> seed2(const S& x, bool inner, bool outer) {
  return {Dual<S>{x, S(inner ? 1.0 : 0.0)}, Dual<S>{S(outer ? 1.0 : 0.0), S(0.0)}};
}

}  // namespace detail

/// Position with first and second parameter derivatives at (u, v).
template <class S, class Shape>
SurfaceJet<S> surface_jet(const Shape& shape, const S& u, const S& v) {
  using DD = Dual<Dual<S>>;
  SurfaceJet<S> jet;
  jet.dim = Shape::dim;
  const int n = Shape::dim;
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      DD uu = detail::seed2(u, a == 0, b == 0);
      DD vv = detail::seed2(v, a == 1, b == 1);
      Vec3T<DD> p = shape.position(uu, vv);
      if (a == 0 && b == 0) jet.X = {p.x.v.v, p.y.v.v, p.z.v.v};
      jet.dX[a] = {p.x.v.d, p.y.v.d, p.z.v.d};
      jet.dX[b] = {p.x.d.v, p.y.d.v, p.z.d.v};
      jet.ddX[a][b] = {p.x.d.d, p.y.d.d, p.z.d.d};
      jet.ddX[b][a] = jet.ddX[a][b];
    }
  }
  return jet;
}

template <class S>
LocalGeometryT<S> local_geometry_from_jet(const SurfaceJet<S>& jet) {
  using std::sqrt;
  LocalGeometryT<S> geo;
  geo.dim = jet.dim;
  geo.X = jet.X;
  for (int i = 0; i < 2; ++i) {
    geo.dX[i] = jet.dX[i];
    for (int j = 0; j < 2; ++j) geo.ddX[i][j] = jet.ddX[i][j];
  }
  const int n = jet.dim;
  if (n == 1) {
    S len = sqrt(dot(jet.dX[0], jet.dX[0]));
    Vec3T<S> t = jet.dX[0] / len;
    geo.nu = {t.y, -t.x, S(0.0)};
    geo.g[0][0] = len * len;
    geo.g_inv[0][0] = S(1.0) / geo.g[0][0];
    geo.h[0][0] = -dot(jet.ddX[0][0], geo.nu);
    geo.H = geo.h[0][0] * geo.g_inv[0][0];
    return geo;
  }
  Vec3T<S> c = cross(jet.dX[1], jet.dX[0]);
  geo.nu = c / sqrt(dot(c, c));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      geo.g[i][j] = dot(jet.dX[i], jet.dX[j]);
      geo.h[i][j] = -dot(jet.ddX[i][j], geo.nu);
    }
  S det = geo.g[0][0] * geo.g[1][1] - geo.g[0][1] * geo.g[1][0];
  geo.g_inv[0][0] = geo.g[1][1] / det;
  geo.g_inv[1][1] = geo.g[0][0] / det;
  geo.g_inv[0][1] = -geo.g[0][1] / det;
  geo.g_inv[1][0] = -geo.g[1][0] / det;
  geo.H = S(0.0);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) geo.H = geo.H + geo.g_inv[i][j] * geo.h[j][i];
  return geo;
}

template <class S, class Shape>
LocalGeometryT<S> local_geometry(const Shape& shape, const S& u, const S& v) {
  return local_geometry_from_jet(surface_jet(shape, u, v));
}

// ---------------------------------------------------------------------------
// Second-order normal coordinates.
//
// phi(v) = u0 + A v - 1/2 Gamma(A v, A v) with A^T g A = I. The chart has an
// orthonormal coordinate frame and vanishing Christoffel symbols at v = 0, so
// partial derivatives up to second order at the base point coincide with
// covariant derivatives; this is all the derivative identities need.

struct NormalChart {
  int dim = 1;
  double u0[2]{};
  double A[2][2]{};          // coordinate change, columns are chart directions
  double gamma[2][2][2]{};   // gamma[k][i][j] = Christoffel symbol Gamma^k_ij at u0

  template <class S>
  std::array<S, 2> map(const std::array<S, 2>& w) const {
    std::array<S, 2> av{S(0.0), S(0.0)};
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i) av[k] = av[k] + S(A[k][i]) * w[i];
    std::array<S, 2> out{S(u0[0]), S(u0[1])};
    for (int k = 0; k < dim; ++k) {
      S quad(0.0);
      for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) quad = quad + S(gamma[k][i][j]) * av[i] * av[j];
      out[k] = out[k] + av[k] - S(0.5) * quad;
    }
    return out;
  }

  /// Jacobian d phi / d w at w, entry [k][j].
  template <class S>
  std::array<std::array<S, 2>, 2> jacobian(const std::array<S, 2>& w) const {
    std::array<S, 2> av{S(0.0), S(0.0)};
    for (int k = 0; k < dim; ++k)
      for (int i = 0; i < dim; ++i) av[k] = av[k] + S(A[k][i]) * w[i];
    std::array<std::array<S, 2>, 2> jac{};
    for (int k = 0; k < 2; ++k)
      for (int j = 0; j < 2; ++j) jac[k][j] = S(0.0);
    for (int k = 0; k < dim; ++k)
      for (int j = 0; j < dim; ++j) {
        S corr(0.0);
        for (int a = 0; a < dim; ++a)
          for (int b = 0; b < dim; ++b) corr = corr + S(gamma[k][a][b]) * av[a] * S(A[b][j]);
        jac[k][j] = S(A[k][j]) - corr;
      }
    return jac;
  }
};

template <class Shape>
NormalChart make_normal_chart(const Shape& shape, const Param& p) {
  LocalGeometryT<double> geo = local_geometry(shape, p.u, p.v);
  NormalChart chart;
  chart.dim = Shape::dim;
  chart.u0[0] = p.u;
  chart.u0[1] = p.v;
  if (Shape::dim == 1) {
    chart.A[0][0] = 1.0 / std::sqrt(geo.g[0][0]);
    chart.gamma[0][0][0] = geo.g_inv[0][0] * dot(geo.ddX[0][0], geo.dX[0]);
    return chart;
  }
  // Cholesky g = L L^T, A = L^-T.
  double l00 = std::sqrt(geo.g[0][0]);
  double l10 = geo.g[1][0] / l00;
  double l11 = std::sqrt(geo.g[1][1] - l10 * l10);
  chart.A[0][0] = 1.0 / l00;
  chart.A[0][1] = -l10 / (l00 * l11);
  chart.A[1][0] = 0.0;
  chart.A[1][1] = 1.0 / l11;
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double s = 0.0;
        for (int l = 0; l < 2; ++l) s += geo.g_inv[k][l] * dot(geo.ddX[i][j], geo.dX[l]);
        chart.gamma[k][i][j] = s;
      }
  return chart;
}

/// Geometry pulled back through a normal chart, in chart coordinates.
template <class S>
struct ChartGeometryT {
  int dim = 1;
  Vec3T<S> X;
  Vec3T<S> nu;
  Vec3T<S> frame[2];  // d(X o phi)/dw_i
  S h[2][2]{};        // second fundamental form in chart coordinates
  S H{};
};

template <class S, class Shape>
ChartGeometryT<S> chart_geometry(const Shape& shape, const NormalChart& chart, const std::array<S, 2>& w) {
  std::array<S, 2> u = chart.map(w);
  LocalGeometryT<S> geo = local_geometry(shape, u[0], u[1]);
  auto jac = chart.jacobian(w);
  ChartGeometryT<S> out;
  out.dim = Shape::dim;
  out.X = geo.X;
  out.nu = geo.nu;
  out.H = geo.H;
  const int n = Shape::dim;
  for (int i = 0; i < n; ++i) {
    out.frame[i] = Vec3T<S>{S(0.0), S(0.0), S(0.0)};
    for (int k = 0; k < n; ++k) out.frame[i] += geo.dX[k] * jac[k][i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      S s(0.0);
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) s = s + jac[a][i] * geo.h[a][b] * jac[b][j];
      out.h[i][j] = s;
    }
  return out;
}

// ---------------------------------------------------------------------------
// Type-erased front end.

/// Exact geometric data at one point, in an orthonormal normal-coordinate frame.
struct PointData {
  int dim = 1;
  Vec3 X;
  Vec3 nu;
  Vec3 frame[2];       // orthonormal tangent frame d_i X at the base point
  double H = 0.0;
  double h[2][2]{};    // second fundamental form in the frame
  double grad_H[2]{};  // nabla_i H
  double hess_H[2][2]{};    // nabla_j nabla_i H
  double grad_h[2][2][2]{};  // grad_h[j][i][q] = nabla_j h_iq
  double k_min = 0.0, k_max = 0.0;
  double norm_A2 = 0.0;  // |h|^2
};

class AnalyticSurface {
 public:
  AnalyticSurface(ShapeVariant shape) : shape_(shape) {}  // NOLINT: implicit
  template <class Shape>
    requires std::is_constructible_v<ShapeVariant, Shape>
  AnalyticSurface(Shape shape) : shape_(std::move(shape)) {}  // NOLINT: implicit

  static AnalyticSurface circle(double r) { return CircleShape{r}; }
  static AnalyticSurface ellipse(double a, double b) { return EllipseShape{a, b}; }
  static AnalyticSurface sphere(double r) { return SphereShape{r}; }
  static AnalyticSurface ellipsoid(double a, double c) { return EllipsoidShape{a, c}; }
  static AnalyticSurface torus(double major, double minor) { return TorusShape{major, minor}; }

  int dim() const;
  std::string name() const;
  const ShapeVariant& shape() const { return shape_; }

  Vec3 position(const Param& p) const;
  /// Derivatives d_a X, d_a d_b X and d_a d_b d_c X in the raw parametrization.
  Vec3 d1(const Param& p, int a) const;
  Vec3 d2(const Param& p, int a, int b) const;
  Vec3 d3(const Param& p, int a, int b, int c) const;
  LocalGeometryT<double> local(const Param& p) const;
  NormalChart chart(const Param& p) const;

  /// Full point data in normal coordinates, including nabla H, nabla^2 H and nabla h.
  PointData point(const Param& p) const;

  /// Position, normal and H at chart coordinate w around `chart` (long double
  /// for finite-difference stencils).
  ChartGeometryT<long double> chart_geometry_ld(const NormalChart& chart, const std::array<long double, 2>& w) const;

  /// Dense arclength-uniform samples of a plane curve or of a profile curve
  /// (sphere-type profile runs pole to pole inclusive; torus profile is closed).
  std::vector<Param> profile_params(int count) const;

 private:
  ShapeVariant shape_;
};

}  // namespace nclab
