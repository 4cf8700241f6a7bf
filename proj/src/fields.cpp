#include <cmath>

#include "nclab/geometry.hpp"

namespace nclab {

namespace {

// Neighbourhood of vertex i. On sphere-type profiles the pole's missing
// neighbour is the mirror image of its real neighbour across the axis.
struct Stencil {
  Vec2 prev, cur, next;
  std::size_t ip = 0, in = 0;
  bool pole = false;
};

Stencil stencil(const Geometry& g, std::size_t i) {
  const auto& v = vertices(g);
  const std::size_t n = v.size();
  Stencil st;
  st.cur = v[i];
  const auto* surf = std::get_if<AxisymmetricSurface>(&g);
  if (surf && surf->topology == ProfileTopology::sphere && (i == 0 || i == n - 1)) {
    st.pole = true;
    std::size_t nb = (i == 0) ? 1 : n - 2;
    st.ip = st.in = nb;
    Vec2 mirror{-v[nb].x, v[nb].y};
    st.prev = (i == 0) ? mirror : v[nb];
    st.next = (i == 0) ? v[nb] : mirror;
    return st;
  }
  st.ip = (i + n - 1) % n;
  st.in = (i + 1) % n;
  st.prev = v[st.ip];
  st.next = v[st.in];
  return st;
}

struct CircleFit {
  double kappa;
  Vec2 tangent;
  double h1, h2;
};

// Circle through three consecutive vertices: signed curvature (positive for
// left turns) and the circle's unit tangent at the middle vertex.
CircleFit fit_circle(const Stencil& st, std::size_t index) {
  Vec2 e1 = st.cur - st.prev, e2 = st.next - st.cur, chord = st.next - st.prev;
  double l1 = norm(e1), l2 = norm(e2), l3 = norm(chord);
  if (!(l1 > 0.0) || !(l2 > 0.0)) throw DegenerateSpacingError(index);
  CircleFit fit;
  fit.h1 = l1;
  fit.h2 = l2;
  fit.kappa = 2.0 * cross(e1, e2) / (l1 * l2 * l3);
  // Direction from the middle vertex to the circumcentre (up to scale).
  Vec2 a = st.prev - st.cur, b = st.next - st.cur;
  Vec2 toward_centre{b.y * norm2(a) - a.y * norm2(b), a.x * norm2(b) - b.x * norm2(a)};
  Vec2 t = rotate_ccw(toward_centre);
  double tn = norm(t);
  if (tn > 1e-300 && std::abs(cross(e1, e2)) > 1e-14 * l1 * l2) {
    t = t / tn;
    if (dot(t, chord) < 0.0) t = -t;
  } else {
    t = chord / l3;
  }
  fit.tangent = t;
  return fit;
}

struct Weights {
  double d1_prev, d1_cur, d1_next;  // first derivative
  double d2_prev, d2_cur, d2_next;  // second derivative
};

Weights fd_weights(double h1, double h2) {
  Weights w;
  w.d1_prev = -h2 / (h1 * (h1 + h2));
  w.d1_cur = (h2 - h1) / (h1 * h2);
  w.d1_next = h1 / (h2 * (h1 + h2));
  w.d2_prev = 2.0 / (h1 * (h1 + h2));
  w.d2_cur = -2.0 / (h1 * h2);
  w.d2_next = 2.0 / (h2 * (h1 + h2));
  return w;
}

}  // namespace

VertexFields compute_fields(const Geometry& g) {
  const auto& v = vertices(g);
  const std::size_t n = v.size();
  VertexFields f;
  f.dim = dimension(g);
  f.normal.resize(n);
  f.tangent.resize(n);
  f.kappa.resize(n);
  f.H.resize(n);
  f.norm_A2.resize(n);
  if (f.dim == 2) f.kappa_az.resize(n);

  for (std::size_t i = 0; i < n; ++i) {
    Stencil st = stencil(g, i);
    CircleFit fit = fit_circle(st, i);
    f.kappa[i] = fit.kappa;
    f.tangent[i] = fit.tangent;
    f.normal[i] = rotate_cw(fit.tangent);
    if (f.dim == 1) {
      f.H[i] = fit.kappa;
      f.norm_A2[i] = fit.kappa * fit.kappa;
      continue;
    }
    if (st.pole) {
      f.kappa_az[i] = fit.kappa;
    } else {
      f.kappa_az[i] = f.normal[i].x / st.cur.x;
    }
    f.H[i] = f.kappa[i] + f.kappa_az[i];
    f.norm_A2[i] = f.kappa[i] * f.kappa[i] + f.kappa_az[i] * f.kappa_az[i];
  }
  f.grad_H = arclength_derivative(g, f.H);
  f.lap_H = laplacian(g, f.H);
  return f;
}

std::vector<double> arclength_derivative(const Geometry& g, std::span<const double> values) {
  const std::size_t n = vertex_count(g);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stencil st = stencil(g, i);
    if (st.pole) {
      out[i] = 0.0;
      continue;
    }
    double h1 = norm(st.cur - st.prev), h2 = norm(st.next - st.cur);
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw DegenerateSpacingError(i);
    Weights w = fd_weights(h1, h2);
    out[i] = w.d1_prev * values[st.ip] + w.d1_cur * values[i] + w.d1_next * values[st.in];
  }
  return out;
}

std::vector<double> laplacian(const Geometry& g, std::span<const double> values) {
  const std::size_t n = vertex_count(g);
  const bool surface = dimension(g) == 2;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    Stencil st = stencil(g, i);
    double h1 = norm(st.cur - st.prev), h2 = norm(st.next - st.cur);
    if (!(h1 > 0.0) || !(h2 > 0.0)) throw DegenerateSpacingError(i);
    Weights w = fd_weights(h1, h2);
    double second = w.d2_prev * values[st.ip] + w.d2_cur * values[i] + w.d2_next * values[st.in];
    if (!surface) {
      out[i] = second;
    } else if (st.pole) {
      // (1/r)(r f_s)_s -> 2 f_ss on the axis.
      out[i] = 2.0 * second;
    } else {
      double first = w.d1_prev * values[st.ip] + w.d1_cur * values[i] + w.d1_next * values[st.in];
      Vec2 t = normalized(st.next - st.prev);
      out[i] = second + (t.x / st.cur.x) * first;
    }
  }
  return out;
}

}  // namespace nclab
