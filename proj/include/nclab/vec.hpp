#pragma once

// Small fixed-size vectors. Templated on the scalar so the analytic surfaces
// can be evaluated with dual numbers as well as double / long double.

#include <cmath>
#include <ostream>

namespace nclab {

template <class T>
struct Vec2T {
  T x{}, y{};

  constexpr Vec2T() = default;
  constexpr Vec2T(T x_, T y_) : x(x_), y(y_) {}

  Vec2T& operator+=(const Vec2T& o) { x += o.x; y += o.y; return *this; }
  Vec2T& operator-=(const Vec2T& o) { x -= o.x; y -= o.y; return *this; }
  Vec2T& operator*=(const T& s) { x *= s; y *= s; return *this; }

  friend Vec2T operator+(Vec2T a, const Vec2T& b) { return a += b; }
  friend Vec2T operator-(Vec2T a, const Vec2T& b) { return a -= b; }
  friend Vec2T operator-(const Vec2T& a) { return {-a.x, -a.y}; }
  friend Vec2T operator*(Vec2T a, const T& s) { return a *= s; }
  friend Vec2T operator*(const T& s, Vec2T a) { return a *= s; }
  friend Vec2T operator/(const Vec2T& a, const T& s) { return {a.x / s, a.y / s}; }
  friend bool operator==(const Vec2T&, const Vec2T&) = default;
};

template <class T>
struct Vec3T {
  T x{}, y{}, z{};

  constexpr Vec3T() = default;
  constexpr Vec3T(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

  Vec3T& operator+=(const Vec3T& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3T& operator-=(const Vec3T& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
  Vec3T& operator*=(const T& s) { x *= s; y *= s; z *= s; return *this; }

  friend Vec3T operator+(Vec3T a, const Vec3T& b) { return a += b; }
  friend Vec3T operator-(Vec3T a, const Vec3T& b) { return a -= b; }
  friend Vec3T operator-(const Vec3T& a) { return {-a.x, -a.y, -a.z}; }
  friend Vec3T operator*(Vec3T a, const T& s) { return a *= s; }
  friend Vec3T operator*(const T& s, Vec3T a) { return a *= s; }
  friend Vec3T operator/(const Vec3T& a, const T& s) { return {a.x / s, a.y / s, a.z / s}; }
  friend bool operator==(const Vec3T&, const Vec3T&) = default;
};

using Vec2 = Vec2T<double>;
using Vec3 = Vec3T<double>;

template <class T> T dot(const Vec2T<T>& a, const Vec2T<T>& b) { return a.x * b.x + a.y * b.y; }
template <class T> T dot(const Vec3T<T>& a, const Vec3T<T>& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

/// z-component of the planar cross product.
template <class T> T cross(const Vec2T<T>& a, const Vec2T<T>& b) { return a.x * b.y - a.y * b.x; }

template <class T>
Vec3T<T> cross(const Vec3T<T>& a, const Vec3T<T>& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

template <class T> T norm2(const Vec2T<T>& a) { return dot(a, a); }
template <class T> T norm2(const Vec3T<T>& a) { return dot(a, a); }

template <class T> T norm(const Vec2T<T>& a) { using std::sqrt; return sqrt(dot(a, a)); }
template <class T> T norm(const Vec3T<T>& a) { using std::sqrt; return sqrt(dot(a, a)); }

template <class T> Vec2T<T> normalized(const Vec2T<T>& a) { return a / norm(a); }
template <class T> Vec3T<T> normalized(const Vec3T<T>& a) { return a / norm(a); }

/// Clockwise rotation by 90 degrees. For a counterclockwise curve this maps
/// the unit tangent to the outward normal.
template <class T> Vec2T<T> rotate_cw(const Vec2T<T>& a) { return {a.y, -a.x}; }
template <class T> Vec2T<T> rotate_ccw(const Vec2T<T>& a) { return {-a.y, a.x}; }

inline Vec3 lift(const Vec2& a) { return {a.x, a.y, 0.0}; }

template <class T>
std::ostream& operator<<(std::ostream& os, const Vec2T<T>& a) {
  return os << '(' << a.x << ", " << a.y << ')';
}

template <class T>
std::ostream& operator<<(std::ostream& os, const Vec3T<T>& a) {
  return os << '(' << a.x << ", " << a.y << ", " << a.z << ')';
}

}  // namespace nclab
