#pragma once

// Forward-mode dual numbers. Nesting Dual<Dual<T>> gives exact mixed second
// derivatives, and so on; the analytic surfaces use up to four levels.

#include <cmath>
#include <type_traits>

namespace nclab {

template <class T>
struct Dual {
  T v{};  // value
  T d{};  // derivative along the seeded direction

  constexpr Dual() = default;
  constexpr Dual(double c) : v(c), d(0.0) {}  // NOLINT: implicit lift of constants
  constexpr Dual(const T& c) requires(!std::is_same_v<T, double>) : v(c), d(0.0) {}  // NOLINT
  constexpr Dual(T v_, T d_) : v(v_), d(d_) {}

  Dual& operator+=(const Dual& o) { v += o.v; d += o.d; return *this; }
  Dual& operator-=(const Dual& o) { v -= o.v; d -= o.d; return *this; }
  Dual& operator*=(const Dual& o) { d = d * o.v + v * o.d; v *= o.v; return *this; }
  Dual& operator/=(const Dual& o) {
    T inv = T(1.0) / o.v;
    d = (d - v * inv * o.d) * inv;
    v *= inv;
    return *this;
  }

  friend Dual operator+(Dual a, const Dual& b) { return a += b; }
  friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
  friend Dual operator*(Dual a, const Dual& b) { return a *= b; }
  friend Dual operator/(Dual a, const Dual& b) { return a /= b; }
  friend Dual operator-(const Dual& a) { return {-a.v, -a.d}; }

  friend bool operator<(const Dual& a, const Dual& b) { return a.v < b.v; }
  friend bool operator>(const Dual& a, const Dual& b) { return a.v > b.v; }
};

template <class T> Dual<T> sin(const Dual<T>& a) { using std::sin; using std::cos; return {sin(a.v), cos(a.v) * a.d}; }
template <class T> Dual<T> cos(const Dual<T>& a) { using std::sin; using std::cos; return {cos(a.v), -sin(a.v) * a.d}; }

template <class T>
Dual<T> sqrt(const Dual<T>& a) {
  using std::sqrt;
  T s = sqrt(a.v);
  return {s, a.d / (T(2.0) * s)};
}

/// Plain value of a possibly nested dual.
inline double value(double x) { return x; }
inline long double value(long double x) { return x; }
template <class T> auto value(const Dual<T>& x) { return value(x.v); }

/// Lift a scalar into a dual seeded with derivative `seed`.
template <class T>
Dual<T> seeded(const T& x, double seed) { return {x, T(seed)}; }

}  // namespace nclab
