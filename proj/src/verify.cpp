#include "nclab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "nclab/noncollapse.hpp"

namespace nclab {

std::string to_string(IdentityId id) {
  switch (id) {
    case IdentityId::Zy: return "Zy";
    case IdentityId::Zx: return "Zx";
    case IdentityId::Zyy: return "Zyy";
    case IdentityId::Zxy: return "Zxy";
    case IdentityId::Zxx: return "Zxx";
    case IdentityId::Zt: return "Zt";
    case IdentityId::Lemma1: return "Lemma1";
    case IdentityId::EvolutionIdentity: return "EvolutionIdentity";
  }
  return "unknown";
}

std::optional<IdentityId> parse_identity(const std::string& name) {
  for (IdentityId id : {IdentityId::Zy, IdentityId::Zx, IdentityId::Zyy, IdentityId::Zxy, IdentityId::Zxx,
                        IdentityId::Zt, IdentityId::Lemma1, IdentityId::EvolutionIdentity})
    if (to_string(id) == name) return id;
  return std::nullopt;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string param_text(const AnalyticSurface& s, const Param& p) {
  if (s.dim() == 1) return "(u=" + fmt("%.6g", p.u) + ")";
  return "(u=" + fmt("%.6g", p.u) + ",v=" + fmt("%.6g", p.v) + ")";
}

IdentityResidual make(IdentityId id, const std::string& config) {
  IdentityResidual r;
  r.id = id;
  r.configuration = config;
  r.config_hash = fnv1a(config);
  return r;
}

// Residual at h and h/2 with the order test applied above the noise floor.
void finish_order(IdentityResidual& r, double res_h, double res_half, double tol, double noise, const Tolerances& t) {
  r.residual = res_h;
  r.residual_half = res_half;
  r.tolerance = tol;
  bool ok = res_h <= tol;
  if (res_h > noise && res_half > 0.0) {
    double ratio = res_h / res_half;
    r.order = std::log2(ratio);
    if (ratio < t.ratio_lo || ratio > t.ratio_hi) {
      ok = false;
      r.note = "halving ratio " + fmt("%.4g", ratio) + " outside [" + fmt("%g", t.ratio_lo) + ", " +
               fmt("%g", t.ratio_hi) + "]";
    }
  } else {
    r.note = "truncation below noise floor; order not measured";
  }
  r.passed = ok;
}

}  // namespace

std::string describe(const PairConfig& c) {
  return c.surface.name() + " x=" + param_text(c.surface, c.x) + " y=" + param_text(c.surface, c.y) +
         " delta=" + fmt("%.6g", c.delta);
}

ZDerivatives analytic_derivatives(const PointData& px, const PointData& py, double delta) {
  const int n = px.dim;
  ZDerivatives z;
  z.dim = n;
  const Vec3 chord = py.X - px.X;
  const double d = norm(chord);
  const Vec3 w = chord / d;
  const double H = px.H;
  z.z = 0.5 * H * d * d + delta * dot(chord, px.nu);
  for (int i = 0; i < n; ++i) {
    z.zy[i] = d * H * dot(w, py.frame[i]) + delta * dot(py.frame[i], px.nu);
    double shape = 0.0;
    for (int p = 0; p < n; ++p) shape += px.h[i][p] * dot(w, px.frame[p]);
    z.zx[i] = -d * H * dot(w, px.frame[i]) + 0.5 * d * d * px.grad_H[i] + delta * d * shape;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      z.zyy[i][j] = H * dot(py.frame[i], py.frame[j]) - d * H * py.h[i][j] * dot(w, py.nu) -
                    delta * py.h[i][j] * dot(py.nu, px.nu);
      double s = 0.0;
      for (int p = 0; p < n; ++p) s += px.h[j][p] * dot(py.frame[i], px.frame[p]);
      z.zxy[i][j] = -H * dot(px.frame[j], py.frame[i]) + d * dot(w, py.frame[i]) * px.grad_H[j] + delta * s;
      double grad_shape = 0.0, hh = 0.0;
      for (int p = 0; p < n; ++p) {
        grad_shape += px.grad_h[j][i][p] * dot(w, px.frame[p]);
        hh += px.h[i][p] * px.h[p][j];
      }
      z.zxx[i][j] = H * dot(px.frame[j], px.frame[i]) - d * dot(w, px.frame[i]) * px.grad_H[j] +
                    d * H * px.h[i][j] * dot(w, px.nu) - d * dot(w, px.frame[j]) * px.grad_H[i] +
                    0.5 * d * d * px.hess_H[j][i] + delta * d * grad_shape - delta * px.h[i][j] -
                    delta * d * hh * dot(w, px.nu);
    }
  return z;
}

ZDerivatives analytic_derivatives(const PairConfig& c) {
  return analytic_derivatives(c.surface.point(c.x), c.surface.point(c.y), c.delta);
}

ZDerivatives finite_difference_derivatives(const PairConfig& c, double h) {
  using LD = long double;
  const int n = c.surface.dim();
  const NormalChart cx = c.surface.chart(c.x), cy = c.surface.chart(c.y);
  const LD delta = c.delta;
  auto Z = [&](std::array<LD, 2> wx, std::array<LD, 2> wy) {
    auto gx = c.surface.chart_geometry_ld(cx, wx);
    auto gy = c.surface.chart_geometry_ld(cy, wy);
    Vec3T<LD> chord = gy.X - gx.X;
    return gx.H / 2 * dot(chord, chord) + delta * dot(chord, gx.nu);
  };
  const LD hh = h;
  auto e = [&](int i, LD s) {
    std::array<LD, 2> v{0.0L, 0.0L};
    v[i] = s;
    return v;
  };
  auto add = [](std::array<LD, 2> a, std::array<LD, 2> b) { return std::array<LD, 2>{a[0] + b[0], a[1] + b[1]}; };
  const std::array<LD, 2> o{0.0L, 0.0L};
  ZDerivatives z;
  z.dim = n;
  const LD z0 = Z(o, o);
  z.z = double(z0);
  for (int i = 0; i < n; ++i) {
    z.zy[i] = double((Z(o, e(i, hh)) - Z(o, e(i, -hh))) / (2 * hh));
    z.zx[i] = double((Z(e(i, hh), o) - Z(e(i, -hh), o)) / (2 * hh));
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        z.zyy[i][i] = double((Z(o, e(i, hh)) - 2 * z0 + Z(o, e(i, -hh))) / (hh * hh));
        z.zxx[i][i] = double((Z(e(i, hh), o) - 2 * z0 + Z(e(i, -hh), o)) / (hh * hh));
      } else {
        z.zyy[i][j] = double((Z(o, add(e(i, hh), e(j, hh))) - Z(o, add(e(i, hh), e(j, -hh))) -
                              Z(o, add(e(i, -hh), e(j, hh))) + Z(o, add(e(i, -hh), e(j, -hh)))) /
                             (4 * hh * hh));
        z.zxx[i][j] = double((Z(add(e(i, hh), e(j, hh)), o) - Z(add(e(i, hh), e(j, -hh)), o) -
                              Z(add(e(i, -hh), e(j, hh)), o) + Z(add(e(i, -hh), e(j, -hh)), o)) /
                             (4 * hh * hh));
      }
      // d^2 Z / dy^i dx^j
      z.zxy[i][j] = double((Z(e(j, hh), e(i, hh)) - Z(e(j, hh), e(i, -hh)) - Z(e(j, -hh), e(i, hh)) +
                            Z(e(j, -hh), e(i, -hh))) /
                           (4 * hh * hh));
    }
  return z;
}

double default_step(const PairConfig& c) {
  // Inverse length scale: principal curvatures, and the scales on which H
  // varies (|grad H| / |H|, sqrt(|hess H| / |H|)).
  auto scale = [](const PointData& p) {
    double k = std::max(std::abs(p.k_min), std::abs(p.k_max));
    double H = std::abs(p.H);
    if (H > 0.0) {
      double g = 0.0, hs = 0.0;
      for (int i = 0; i < p.dim; ++i) {
        g = std::max(g, std::abs(p.grad_H[i]));
        for (int j = 0; j < p.dim; ++j) hs = std::max(hs, std::abs(p.hess_H[i][j]));
      }
      k = std::max({k, g / H, std::sqrt(hs / H)});
    }
    return k;
  };
  double k = std::max(scale(c.surface.point(c.x)), scale(c.surface.point(c.y)));
  return k > 0.0 ? 2.5e-4 / k : 2.5e-4;
}

Tolerances Tolerances::scaled(double f) const {
  Tolerances t = *this;
  t.first *= f;
  t.second *= f;
  t.lemma1 *= f;
  t.time *= f;
  t.evolution *= f;
  return t;
}

namespace {

double max_abs_first(const ZDerivatives& a, const ZDerivatives& b, bool y) {
  double r = 0.0;
  for (int i = 0; i < a.dim; ++i) r = std::max(r, std::abs(y ? a.zy[i] - b.zy[i] : a.zx[i] - b.zx[i]));
  return r;
}

double max_abs_second(const ZDerivatives& a, const ZDerivatives& b, IdentityId id) {
  double r = 0.0;
  for (int i = 0; i < a.dim; ++i)
    for (int j = 0; j < a.dim; ++j) {
      double da = id == IdentityId::Zyy ? a.zyy[i][j] : id == IdentityId::Zxy ? a.zxy[i][j] : a.zxx[i][j];
      double db = id == IdentityId::Zyy ? b.zyy[i][j] : id == IdentityId::Zxy ? b.zxy[i][j] : b.zxx[i][j];
      r = std::max(r, std::abs(da - db));
    }
  return r;
}

// Rounding floor of a central difference of order p at step h: 100 ulps of the
// magnitude of Z's terms, divided by h^p.
double rounding_floor(const PairConfig& c, const ZDerivatives& exact, double h, int p) {
  PointData px = c.surface.point(c.x), py = c.surface.point(c.y);
  const double d = norm(py.X - px.X);
  const double scale = 1.0 + std::abs(exact.z) + std::abs(px.H) * d * d + std::abs(c.delta) * d;
  return 100.0 * std::numeric_limits<long double>::epsilon() * scale / std::pow(h, p);
}

}  // namespace

std::array<IdentityResidual, 2> check_first_derivatives(const PairConfig& c, double h, const Tolerances& tol) {
  if (h <= 0.0) h = default_step(c);
  const std::string config = describe(c);
  ZDerivatives exact = analytic_derivatives(c);
  ZDerivatives fd1 = finite_difference_derivatives(c, h), fd2 = finite_difference_derivatives(c, h / 2);
  std::array<IdentityResidual, 2> out{make(IdentityId::Zy, config), make(IdentityId::Zx, config)};
  for (int k = 0; k < 2; ++k) {
    out[k].h = h;
    finish_order(out[k], max_abs_first(fd1, exact, k == 0), max_abs_first(fd2, exact, k == 0), tol.first,
                 std::max(tol.noise_first, rounding_floor(c, exact, h / 2, 1)), tol);
  }
  return out;
}

std::array<IdentityResidual, 3> check_second_derivatives(const PairConfig& c, double h, const Tolerances& tol) {
  if (h <= 0.0) h = default_step(c);
  const std::string config = describe(c);
  ZDerivatives exact = analytic_derivatives(c);
  ZDerivatives fd1 = finite_difference_derivatives(c, h), fd2 = finite_difference_derivatives(c, h / 2);
  const IdentityId ids[3] = {IdentityId::Zyy, IdentityId::Zxy, IdentityId::Zxx};
  std::array<IdentityResidual, 3> out{make(ids[0], config), make(ids[1], config), make(ids[2], config)};
  for (int k = 0; k < 3; ++k) {
    out[k].h = h;
    finish_order(out[k], max_abs_second(fd1, exact, ids[k]), max_abs_second(fd2, exact, ids[k]), tol.second,
                 std::max(tol.noise_second, rounding_floor(c, exact, h / 2, 2)), tol);
  }
  return out;
}

IdentityResidual check_lemma1(const PairConfig& c, const Tolerances& tol) {
  IdentityResidual r = make(IdentityId::Lemma1, describe(c));
  r.tolerance = tol.lemma1;
  if (c.delta == 0.0) {
    r.skipped = r.passed = true;
    r.note = "delta = 0: identity undefined";
    return r;
  }
  PointData px = c.surface.point(c.x), py = c.surface.point(c.y);
  ZDerivatives z = analytic_derivatives(px, py, c.delta);
  const Vec3 chord = py.X - px.X;
  const double d = norm(chord);
  const Vec3 w = chord / d;
  Vec3 grad{0.0, 0.0, 0.0};
  for (int i = 0; i < px.dim; ++i) grad += py.frame[i] * z.zy[i];
  const double dl = c.delta;
  const double radicand = 1.0 + 2.0 * px.H * z.z / (dl * dl) - dot(grad, grad) / (dl * dl);
  if (radicand < 0.0) {
    r.skipped = r.passed = true;
    r.note = "radicand " + fmt("%.3g", radicand) + " < 0: skipped";
    return r;
  }
  Vec3 lhs = px.nu + w * (d * px.H / dl) - grad / dl;
  Vec3 rhs = py.nu * std::sqrt(radicand);
  r.residual = norm(lhs - rhs);
  r.passed = r.residual <= tol.lemma1;
  return r;
}

// ---------------------------------------------------------------------------
// Time derivative

double ShrinkingRound::radius(double t) const { return std::sqrt(R0 * R0 - 2.0 * dim * t); }
double ShrinkingRound::extinction() const { return R0 * R0 / (2.0 * dim); }

AnalyticSurface ShrinkingRound::at(double t) const {
  return dim == 1 ? AnalyticSurface::circle(radius(t)) : AnalyticSurface::sphere(radius(t));
}

double ShrinkingRound::z(double t, double theta, double delta) const {
  double s = std::sin(0.5 * theta);
  return 2.0 * radius(t) * (dim - delta) * s * s;
}

double ShrinkingRound::z_t(double t, double theta, double delta) const {
  double s = std::sin(0.5 * theta);
  double R = radius(t);
  return -2.0 * dim / R * (dim - delta) * s * s;
}

namespace {

// Zt right-hand side from exact point data.
double time_rhs(const PointData& px, const PointData& py, double delta) {
  const Vec3 chord = py.X - px.X;
  const double d = norm(chord);
  const Vec3 w = chord / d;
  const Vec3 vel = py.nu * (-py.H) + px.nu * px.H;
  double lap = 0.0;
  Vec3 grad{0.0, 0.0, 0.0};
  for (int i = 0; i < px.dim; ++i) {
    lap += px.hess_H[i][i];
    grad += px.frame[i] * px.grad_H[i];
  }
  return d * px.H * dot(w, vel) + 0.5 * d * d * (lap + px.H * px.norm_A2) + delta * dot(vel, px.nu) +
         delta * d * dot(w, grad);
}

std::pair<Param, Param> round_pair(int dim, double theta) {
  if (dim == 1) return {Param{0.0, 0.0}, Param{theta, 0.0}};
  return {Param{0.5 * kPi, 0.0}, Param{0.5 * kPi, theta}};
}

std::string round_name(const ShrinkingRound& s) {
  return std::string(s.dim == 1 ? "shrinking-circle" : "shrinking-sphere") + "(R0=" + fmt("%.6g", s.R0) + ")";
}

}  // namespace

IdentityResidual check_time_derivative(const ShrinkingRound& s, double t, double theta, double delta, double tau,
                                       const Tolerances& tol) {
  const double R = s.radius(t);
  if (tau <= 0.0) tau = 1e-4 * R * R;
  IdentityResidual r = make(IdentityId::Zt, round_name(s) + " t=" + fmt("%.6g", t) + " theta=" + fmt("%.6g", theta) +
                                                " delta=" + fmt("%.6g", delta));
  AnalyticSurface surf = s.at(t);
  auto [x, y] = round_pair(s.dim, theta);
  const double rhs = time_rhs(surf.point(x), surf.point(y), delta);
  auto central = [&](double step) { return (s.z(t + step, theta, delta) - s.z(t - step, theta, delta)) / (2.0 * step); };
  const double r1 = std::abs(central(tau) - rhs), r2 = std::abs(central(tau / 2) - rhs);
  r.h = tau;
  r.residual = r1;
  r.residual_half = r2;
  if (r1 > 1e-12 && r2 > 0.0) r.order = std::log2(r1 / r2);
  r.tolerance = tol.time;
  r.passed = r1 <= tol.time;
  r.note = "closed-form dZ/dt minus Zt right-hand side: " + fmt("%.3g", std::abs(s.z_t(t, theta, delta) - rhs));
  return r;
}

double time_derivative_rhs(const FlowState& st, std::size_t x, std::size_t y, double delta) {
  SampledHypersurface s = sample(st);
  const std::size_t vx = s.vertex[x];
  const Vec3 chord = s.X[y] - s.X[x];
  const double d = norm(chord);
  const Vec3 w = chord / d;
  const Vec3 vel = s.nu[y] * (-s.weight[y]) + s.nu[x] * s.weight[x];
  const Vec2 t2 = st.fields.tangent[vx];
  // Base points sit at azimuth 0, where the meridian tangent is (t_r, 0, t_z).
  const Vec3 tangent = s.dim == 1 ? Vec3{t2.x, t2.y, 0.0} : Vec3{t2.x, 0.0, t2.y};
  const Vec3 grad = tangent * st.fields.grad_H[vx];
  const double H = s.weight[x];
  return d * H * dot(w, vel) + 0.5 * d * d * (st.fields.lap_H[vx] + H * st.fields.norm_A2[vx]) +
         delta * dot(vel, s.nu[x]) + delta * d * dot(w, grad);
}

namespace {

void require_material_pair(const FlowState& a, const FlowState& b) {
  if (b.remeshed) throw std::invalid_argument("time-derivative check: remeshing was active between the snapshots");
  if (vertex_count(a.geometry) != vertex_count(b.geometry) || dimension(a.geometry) != dimension(b.geometry))
    throw std::invalid_argument("time-derivative check: snapshots do not share vertices");
  if (!(b.t > a.t)) throw std::invalid_argument("time-derivative check: snapshots must be ordered in time");
}

}  // namespace

IdentityResidual check_time_derivative(const FlowState& a, const FlowState& b, std::size_t x, std::size_t y,
                                       double delta, double tolerance) {
  require_material_pair(a, b);
  SampledHypersurface sa = sample(a), sb = sample(b);
  if (x >= sa.base_count || y >= sa.size() || x == y) throw std::invalid_argument("time-derivative check: bad pair");
  const double dt = b.t - a.t;
  const double zt = (z_value(sb, x, y, delta).z - z_value(sa, x, y, delta).z) / dt;
  IdentityResidual r = make(IdentityId::Zt, "discrete t=" + fmt("%.6g", a.t) + " dt=" + fmt("%.6g", dt) + " x=" +
                                                std::to_string(x) + " y=" + std::to_string(y) + " delta=" +
                                                fmt("%.6g", delta));
  r.h = dt;
  r.residual = std::abs(zt - time_derivative_rhs(a, x, y, delta));
  r.tolerance = tolerance;
  r.passed = r.residual <= tolerance;
  return r;
}

// ---------------------------------------------------------------------------
// Evolution identity

namespace {

Vec3 in_plane_tangent(const Vec3& nu, const Vec3& other) {
  Vec3 e = other - nu * dot(other, nu);
  double len = norm(e);
  return len > 1e-12 ? e / len : Vec3{0.0, 0.0, 0.0};
}

}  // namespace

IdentityResidual check_evolution_identity(const ShrinkingRound& s, double t, const Param& x, const Param& y,
                                          double delta, const Tolerances& tol) {
  if (s.dim != 1 && s.dim != 2) throw UnsupportedError("evolution identity: only shrinking circles and spheres");
  if (delta == 0.0) throw std::invalid_argument("evolution identity: delta must be non-zero");
  AnalyticSurface surf = s.at(t);
  PointData px = surf.point(x), py = surf.point(y);
  ZDerivatives z = analytic_derivatives(px, py, delta);
  const int n = s.dim;
  double grad = 0.0;
  for (int i = 0; i < n; ++i) grad = std::max({grad, std::abs(z.zx[i]), std::abs(z.zy[i])});
  if (grad > 1e-9 * std::max(1.0, s.radius(t)))
    throw std::invalid_argument("evolution identity: pair is not a critical point of Z (|grad Z| = " +
                                fmt("%.3g", grad) + ")");

  const double R = s.radius(t);
  const double theta = 2.0 * std::asin(std::min(1.0, norm(py.X - px.X) / (2.0 * R)));
  const double zt = s.z_t(t, theta, delta);
  double op = 0.0;
  for (int i = 0; i < n; ++i) {
    op += z.zxx[i][i] + z.zyy[i][i];
    for (int j = 0; j < n; ++j) op += 2.0 * dot(px.frame[i], py.frame[j]) * z.zxy[j][i];
  }
  const Vec3 chord = py.X - px.X;
  const Vec3 w = chord / norm(chord);
  // Frame vectors in the plane of nu_x and nu_y.
  Vec3 en_x = in_plane_tangent(px.nu, py.nu), en_y = in_plane_tangent(py.nu, px.nu);
  double h_nn = 0.0;
  if (norm(en_x) > 0.0) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h_nn += px.h[i][j] * dot(en_x, px.frame[i]) * dot(en_x, px.frame[j]);
  } else {
    h_nn = px.h[n - 1][n - 1];
  }
  const double wy = dot(w, en_y);
  const double coeff = px.norm_A2 + 4.0 * px.H * (px.H - delta * h_nn) / (delta * delta) * wy * wy;
  IdentityResidual r = make(IdentityId::EvolutionIdentity, round_name(s) + " t=" + fmt("%.6g", t) + " x=" +
                                                                param_text(surf, x) + " y=" + param_text(surf, y) +
                                                                " delta=" + fmt("%.6g", delta));
  r.residual = std::abs(zt - op - coeff * z.z);
  r.tolerance = tol.evolution;
  r.passed = r.residual <= tol.evolution;
  r.note = "analytic fields";
  return r;
}

namespace {

struct CurveStencil {
  std::size_t prev, next;
  double w1[3], w2[3];  // weights for prev, cur, next
};

CurveStencil curve_stencil(const std::vector<Vec2>& v, std::size_t i) {
  const std::size_t n = v.size();
  CurveStencil s;
  s.prev = (i + n - 1) % n;
  s.next = (i + 1) % n;
  double h1 = norm(v[i] - v[s.prev]), h2 = norm(v[s.next] - v[i]);
  s.w1[0] = -h2 / (h1 * (h1 + h2));
  s.w1[1] = (h2 - h1) / (h1 * h2);
  s.w1[2] = h1 / (h2 * (h1 + h2));
  s.w2[0] = 2.0 / (h1 * (h1 + h2));
  s.w2[1] = -2.0 / (h1 * h2);
  s.w2[2] = 2.0 / (h2 * (h1 + h2));
  return s;
}

}  // namespace

IdentityResidual check_evolution_identity(const FlowState& a, const FlowState& b, double delta) {
  if (dimension(a.geometry) != 1)
    throw UnsupportedError(
        "evolution identity on a general axisymmetric pair needs adapted frames at two points in general position; "
        "only curves and round spheres are supported");
  require_material_pair(a, b);
  if (delta == 0.0) throw std::invalid_argument("evolution identity: delta must be non-zero");
  SampledHypersurface sa = sample(a), sb = sample(b);
  Extremum arg = interior_delta_star(sa);
  if (arg.diagonal()) throw std::invalid_argument("evolution identity: delta* is attained on the diagonal");
  const std::size_t x = arg.x, y = arg.y;
  const auto& v = vertices(a.geometry);
  const double dt = b.t - a.t;

  auto Z = [&](std::size_t i, std::size_t j) { return z_value(sa, i, j, delta).z; };
  CurveStencil sx = curve_stencil(v, x), sy = curve_stencil(v, y);
  const std::size_t ix[3] = {sx.prev, x, sx.next}, iy[3] = {sy.prev, y, sy.next};
  double zxx = 0.0, zyy = 0.0, zxy = 0.0;
  for (int k = 0; k < 3; ++k) {
    zxx += sx.w2[k] * Z(ix[k], y);
    zyy += sy.w2[k] * Z(x, iy[k]);
    for (int l = 0; l < 3; ++l) zxy += sx.w1[k] * sy.w1[l] * Z(ix[k], iy[l]);
  }
  const Vec2 tx = a.fields.tangent[x], ty = a.fields.tangent[y];
  const double op = zxx + zyy + 2.0 * dot(tx, ty) * zxy;
  const double zt = (z_value(sb, x, y, delta).z - Z(x, y)) / dt;
  const double H = a.fields.H[x], k = a.fields.kappa[x];
  const Vec2 chord = v[y] - v[x];
  const double wy = dot(chord / norm(chord), ty);
  const double coeff = k * k + 4.0 * H * (H - delta * k) / (delta * delta) * wy * wy;

  IdentityResidual r = make(IdentityId::EvolutionIdentity, "discrete curve N=" + std::to_string(v.size()) + " t=" +
                                                               fmt("%.6g", a.t) + " dt=" + fmt("%.6g", dt) + " x=" +
                                                               std::to_string(x) + " y=" + std::to_string(y) +
                                                               " delta=" + fmt("%.6g", delta));
  r.h = spacing(a.geometry).mean;
  r.residual = std::abs(zt - op - coeff * Z(x, y));
  r.passed = true;
  return r;
}

IdentityResidual evolution_identity_refinement(double a, double b, const std::vector<int>& resolutions,
                                               double delta_factor, const Tolerances& tol) {
  if (resolutions.size() < 2) throw std::invalid_argument("refinement study needs at least two resolutions");
  std::vector<double> residuals, steps;
  IdentityResidual last;
  for (int n : resolutions) {
    FlowState s0 = make_state(build({EllipseSpec{a, b}, n}));
    double delta = delta_factor * interior_delta_star(sample(s0)).value;
    FlowParams p;
    p.remesh = false;
    FlowState s1 = mcf_step(s0, stable_dt(s0, p), p);
    last = check_evolution_identity(s0, s1, delta);
    residuals.push_back(last.residual);
    steps.push_back(last.h);
  }
  IdentityResidual r = make(IdentityId::EvolutionIdentity,
                            "refinement ellipse(a=" + fmt("%.6g", a) + ",b=" + fmt("%.6g", b) + ") delta=" +
                                fmt("%.6g", delta_factor) + "*delta* N=" + std::to_string(resolutions.front()) + ".." +
                                std::to_string(resolutions.back()));
  const std::size_t m = residuals.size();
  r.h = steps[m - 1];
  r.residual = residuals[m - 1];
  r.residual_half = residuals[m - 1];
  double order = std::log2(residuals[m - 2] / residuals[m - 1]) / std::log2(steps[m - 2] / steps[m - 1]);
  r.order = order;
  r.tolerance = tol.evolution_order;
  r.passed = order >= tol.evolution_order;
  std::string trail;
  for (std::size_t i = 0; i < m; ++i) trail += (i ? ", " : "") + fmt("%.3g", residuals[i]);
  r.note = "residuals " + trail + "; pass requires order >= " + fmt("%g", tol.evolution_order);
  return r;
}

// ---------------------------------------------------------------------------
// Default suite

namespace {

std::vector<PairConfig> spatial_configs() {
  std::vector<PairConfig> c;
  auto circle = AnalyticSurface::circle(1.0);
  auto ellipse = AnalyticSurface::ellipse(2.0, 1.0);
  auto sphere = AnalyticSurface::sphere(1.0);
  c.push_back({circle, {0.0, 0.0}, {0.5 * kPi, 0.0}, 0.7});
  c.push_back({circle, {0.3, 0.0}, {2.0, 0.0}, 0.7});
  c.push_back({circle, {0.3, 0.0}, {2.0, 0.0}, 0.0});
  c.push_back({circle, {0.0, 0.0}, {kPi, 0.0}, 1.0});
  c.push_back({AnalyticSurface::circle(2.5), {1.1, 0.0}, {4.0, 0.0}, 0.4});
  c.push_back({ellipse, {0.3, 0.0}, {2.0, 0.0}, 0.7});
  c.push_back({ellipse, {1.0, 0.0}, {4.0, 0.0}, 0.3});
  c.push_back({ellipse, {0.5, 0.0}, {3.5, 0.0}, 1.2});
  c.push_back({ellipse, {0.3, 0.0}, {2.0, 0.0}, 0.0});
  c.push_back({AnalyticSurface::ellipse(1.0, 0.6), {2.2, 0.0}, {5.0, 0.0}, 0.5});
  c.push_back({sphere, {1.0, 0.2}, {2.0, 1.5}, 1.5});
  c.push_back({sphere, {0.7, 0.0}, {2.2, 2.5}, 0.8});
  c.push_back({AnalyticSurface::sphere(1.7), {1.3, 0.4}, {2.6, 3.9}, 1.0});
  c.push_back({AnalyticSurface::ellipsoid(1.0, 0.6), {0.8, 0.1}, {2.0, 1.9}, 0.9});
  c.push_back({AnalyticSurface::ellipsoid(1.0, 1.5), {1.1, 0.3}, {2.4, 3.0}, 1.2});
  c.push_back({AnalyticSurface::ellipsoid(0.8, 1.2), {0.6, 0.0}, {1.7, 2.2}, 0.5});
  c.push_back({AnalyticSurface::ellipsoid(1.0, 0.6), {1.4, 0.7}, {0.9, 4.1}, 0.0});
  return c;
}

}  // namespace

std::vector<IdentityResidual> run_suite(const std::string& selector, const Tolerances& tol) {
  std::optional<IdentityId> only;
  if (selector != "all") {
    only = parse_identity(selector);
    if (!only) throw std::invalid_argument("unknown verification suite '" + selector + "'");
  }
  auto want = [&](IdentityId id) { return !only || *only == id; };
  std::vector<IdentityResidual> out;
  auto keep = [&](const IdentityResidual& r) {
    if (want(r.id)) out.push_back(r);
  };

  const bool spatial = want(IdentityId::Zy) || want(IdentityId::Zx) || want(IdentityId::Zyy) ||
                       want(IdentityId::Zxy) || want(IdentityId::Zxx) || want(IdentityId::Lemma1);
  if (spatial) {
    for (const PairConfig& c : spatial_configs()) {
      if (want(IdentityId::Zy) || want(IdentityId::Zx))
        for (const auto& r : check_first_derivatives(c, 0.0, tol)) keep(r);
      if (want(IdentityId::Zyy) || want(IdentityId::Zxy) || want(IdentityId::Zxx))
        for (const auto& r : check_second_derivatives(c, 0.0, tol)) keep(r);
      if (want(IdentityId::Lemma1)) keep(check_lemma1(c, tol));
    }
  }
  if (want(IdentityId::Zt)) {
    const ShrinkingRound circle{1, 1.0}, sphere{2, 1.0}, big{1, 2.0};
    for (auto [s, t, theta, delta] : {std::tuple{circle, 0.1, 1.0, 0.5}, std::tuple{circle, 0.3, 2.5, 0.9},
                                      std::tuple{circle, 0.2, kPi, 0.0}, std::tuple{big, 1.0, 0.7, 0.3},
                                      std::tuple{sphere, 0.05, 1.2, 1.5}, std::tuple{sphere, 0.15, 2.0, 0.0}})
      keep(check_time_derivative(s, t, theta, delta, 0.0, tol));
  }
  if (want(IdentityId::EvolutionIdentity)) {
    const ShrinkingRound circle{1, 1.0}, sphere{2, 1.0};
    keep(check_evolution_identity(circle, 0.2, {0.0, 0.0}, {kPi, 0.0}, 0.5, tol));
    keep(check_evolution_identity(circle, 0.2, {0.4, 0.0}, {2.1, 0.0}, 1.0, tol));
    keep(check_evolution_identity(circle, 0.05, {1.0, 0.0}, {1.0 + kPi, 0.0}, 0.8, tol));
    keep(check_evolution_identity(sphere, 0.1, {0.5 * kPi, 0.0}, {0.5 * kPi, kPi}, 1.0, tol));
    keep(check_evolution_identity(sphere, 0.1, {0.9, 0.3}, {2.0, 1.7}, 2.0, tol));
    keep(evolution_identity_refinement(2.0, 1.0, {128, 256, 512}, 0.9, tol));
  }
  return out;
}

}  // namespace nclab
