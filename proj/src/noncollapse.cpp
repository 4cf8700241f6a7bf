#include "nclab/noncollapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

namespace nclab {

SampledHypersurface sample(const FlowState& st, Weight weight) {
  const auto& v = vertices(st.geometry);
  const auto& f = st.fields;
  const std::size_t n = v.size();
  if (weight == Weight::f_field && f.f.size() != n) throw std::invalid_argument("f-certificate requested without an f field");
  const auto& w = weight == Weight::f_field ? f.f : f.H;

  SampledHypersurface s;
  s.dim = f.dim;
  s.base_count = n;
  auto push = [&](std::size_t i, double c, double sn) {
    s.X.push_back({v[i].x * c, v[i].x * sn, s.dim == 1 ? 0.0 : v[i].y});
    s.nu.push_back({f.normal[i].x * c, f.normal[i].x * sn, s.dim == 1 ? 0.0 : f.normal[i].y});
    s.weight.push_back(w[i]);
    s.k_min.push_back(f.k_min(i));
    s.k_max.push_back(f.k_max(i));
    s.vertex.push_back(i);
  };
  if (s.dim == 1) {
    for (std::size_t i = 0; i < n; ++i) {
      s.X.push_back({v[i].x, v[i].y, 0.0});
      s.nu.push_back({f.normal[i].x, f.normal[i].y, 0.0});
      s.weight.push_back(w[i]);
      s.k_min.push_back(f.k_min(i));
      s.k_max.push_back(f.k_max(i));
      s.vertex.push_back(i);
    }
    return s;
  }
  const auto& surf = std::get<AxisymmetricSurface>(st.geometry);
  const int m = surf.azimuthal_samples;
  const bool sphere = surf.topology == ProfileTopology::sphere;
  for (std::size_t i = 0; i < n; ++i) push(i, 1.0, 0.0);
  for (int j = 1; j < m; ++j) {
    double phi = 2.0 * kPi * double(j) / double(m);
    double c = std::cos(phi), sn = std::sin(phi);
    for (std::size_t i = 0; i < n; ++i) {
      if (sphere && (i == 0 || i == n - 1)) continue;
      push(i, c, sn);
    }
  }
  return s;
}

ZEvaluation z_value(const SampledHypersurface& s, std::size_t x, std::size_t y, double delta) {
  if (x == y) throw std::invalid_argument("z_value: x == y is excluded; use the diagonal limit");
  if (x >= s.size() || y >= s.size()) throw std::out_of_range("z_value: index out of range");
  ZEvaluation e;
  e.x = x;
  e.y = y;
  e.delta = delta;
  Vec3 c = s.X[y] - s.X[x];
  e.d = norm(c);
  e.w = c / e.d;
  e.inner = dot(c, s.nu[x]);
  e.z = 0.5 * s.weight[x] * e.d * e.d + delta * e.inner;
  return e;
}

namespace {

constexpr std::size_t kBlock = 32;

struct Best {
  double v = 0.0;
  std::size_t x = 0, y = 0;
  bool set = false;

  void offer_min(double val, std::size_t i, std::size_t j) {
    if (!set || val < v || (val == v && (i < x || (i == x && j < y)))) *this = {val, i, j, true};
  }
  void offer_max(double val, std::size_t i, std::size_t j) {
    if (!set || val > v || (val == v && (i < x || (i == x && j < y)))) *this = {val, i, j, true};
  }
};

struct Partial {
  Best interior, exterior, enclosure;
  bool convex = true;
};

struct Box {
  Vec3 lo, hi;
};

std::vector<Box> blocks_of(const SampledHypersurface& s) {
  std::vector<Box> boxes;
  for (std::size_t b = 0; b < s.size(); b += kBlock) {
    Box box{s.X[b], s.X[b]};
    for (std::size_t y = b; y < std::min(s.size(), b + kBlock); ++y) {
      const Vec3& p = s.X[y];
      box.lo = {std::min(box.lo.x, p.x), std::min(box.lo.y, p.y), std::min(box.lo.z, p.z)};
      box.hi = {std::max(box.hi.x, p.x), std::max(box.hi.y, p.y), std::max(box.hi.z, p.z)};
    }
    boxes.push_back(box);
  }
  return boxes;
}

inline void visit_pair(const SampledHypersurface& s, std::size_t x, std::size_t y, Partial& p) {
  const Vec3& a = s.X[x];
  const Vec3& b = s.X[y];
  const Vec3& n = s.nu[x];
  const double dx = b.x - a.x, dy = b.y - a.y, dz = b.z - a.z;
  const double d2 = dx * dx + dy * dy + dz * dz;
  const double inner = dx * n.x + dy * n.y + dz * n.z;
  const double w = s.weight[x];
  if (inner < 0.0) {
    double c = w * d2 / (-2.0 * inner);
    p.interior.offer_min(c, x, y);
    if (p.convex) p.enclosure.offer_max(c, x, y);
  } else {
    p.convex = false;
    if (inner > 0.0) p.exterior.offer_min(w * d2 / (2.0 * inner), x, y);
  }
}

void visit_diagonal(const SampledHypersurface& s, std::size_t x, Partial& p) {
  const double w = s.weight[x];
  if (s.k_max[x] > 0.0) p.interior.offer_min(w / s.k_max[x], x, x);
  if (s.k_min[x] < 0.0) p.exterior.offer_min(w / -s.k_min[x], x, x);
  if (s.k_min[x] > 0.0) {
    if (p.convex) p.enclosure.offer_max(w / s.k_min[x], x, x);
  } else {
    p.convex = false;
  }
}

// Strictly conservative comparisons: a block is skipped only when its bound
// clears the current best by a margin far above rounding.
constexpr double kMargin = 1e-10;

void search_range(const SampledHypersurface& s, const std::vector<Box>* boxes, std::size_t x0, std::size_t x1,
                  Partial& p) {
  for (std::size_t x = x0; x < x1; ++x) {
    visit_diagonal(s, x, p);
    if (!boxes) {
      for (std::size_t y = 0; y < s.size(); ++y)
        if (y != x) visit_pair(s, x, y, p);
      continue;
    }
    const Vec3& a = s.X[x];
    const Vec3& n = s.nu[x];
    const double w = s.weight[x];
    for (std::size_t b = 0; b < boxes->size(); ++b) {
      const Box& box = (*boxes)[b];
      Vec3 centre = (box.lo + box.hi) * 0.5, half = (box.hi - box.lo) * 0.5;
      double mid = dot(centre - a, n);
      double spread = std::abs(n.x) * half.x + std::abs(n.y) * half.y + std::abs(n.z) * half.z;
      double inner_min = mid - spread, inner_max = mid + spread;
      auto gap = [](double lo, double hi, double q) { return q < lo ? lo - q : (q > hi ? q - hi : 0.0); };
      auto far = [](double lo, double hi, double q) { return std::max(std::abs(q - lo), std::abs(q - hi)); };
      double gx = gap(box.lo.x, box.hi.x, a.x), gy = gap(box.lo.y, box.hi.y, a.y), gz = gap(box.lo.z, box.hi.z, a.z);
      double fx = far(box.lo.x, box.hi.x, a.x), fy = far(box.lo.y, box.hi.y, a.y), fz = far(box.lo.z, box.hi.z, a.z);
      double dmin2 = gx * gx + gy * gy + gz * gz, dmax2 = fx * fx + fy * fy + fz * fz;

      bool need = false;
      if (inner_min < 0.0) {
        double lb = w * dmin2 / (-2.0 * inner_min);
        if (!p.interior.set || lb * (1.0 - kMargin) <= p.interior.v) need = true;
      }
      if (!need && inner_max > 0.0) {
        double lb = w * dmin2 / (2.0 * inner_max);
        if (!p.exterior.set || lb * (1.0 - kMargin) <= p.exterior.v) need = true;
      }
      if (!need && p.convex) {
        if (inner_max >= 0.0) {
          need = true;
        } else {
          double ub = w * dmax2 / (-2.0 * inner_max);
          if (!p.enclosure.set || ub * (1.0 + kMargin) >= p.enclosure.v) need = true;
        }
      }
      if (!need) continue;
      const std::size_t end = std::min(s.size(), (b + 1) * kBlock);
      for (std::size_t y = b * kBlock; y < end; ++y)
        if (y != x) visit_pair(s, x, y, p);
    }
  }
}

void merge_min(Best& into, const Best& b) {
  if (b.set) into.offer_min(b.v, b.x, b.y);
}

Extremum to_extremum(const Best& b) {
  Extremum e;
  e.value = b.v;
  e.x = b.x;
  e.y = b.y;
  return e;
}

}  // namespace

Certificates delta_certificates(const SampledHypersurface& s, const SearchOptions& o) {
  for (std::size_t x = 0; x < s.base_count; ++x)
    if (!(s.weight[x] > 0.0))
      throw InvariantViolation("non-collapsing constants need a positive weight; vertex " + std::to_string(x) +
                               " has " + std::to_string(s.weight[x]));
  std::vector<Box> boxes;
  if (o.prune) boxes = blocks_of(s);
  const std::vector<Box>* bp = o.prune ? &boxes : nullptr;

  const std::size_t k = std::max<std::size_t>(1, std::min<std::size_t>(std::size_t(std::max(o.threads, 1)), s.base_count));
  std::vector<Partial> parts(k);
  if (k == 1) {
    search_range(s, bp, 0, s.base_count, parts[0]);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < k; ++i) {
      std::size_t x0 = s.base_count * i / k, x1 = s.base_count * (i + 1) / k;
      pool.emplace_back([&, i, x0, x1] { search_range(s, bp, x0, x1, parts[i]); });
    }
    for (auto& t : pool) t.join();
  }

  Partial all;
  for (const Partial& p : parts) {
    merge_min(all.interior, p.interior);
    merge_min(all.exterior, p.exterior);
    all.convex = all.convex && p.convex;
    if (p.enclosure.set) all.enclosure.offer_max(p.enclosure.v, p.enclosure.x, p.enclosure.y);
  }
  Certificates c;
  c.interior = to_extremum(all.interior);
  if (!all.interior.set) {
    c.interior.finite = false;
    c.interior.value = std::numeric_limits<double>::infinity();
  }
  c.exterior = to_extremum(all.exterior);
  if (!all.exterior.set) {
    c.exterior.finite = false;
    c.exterior.value = std::numeric_limits<double>::infinity();
  }
  c.enclosure = to_extremum(all.enclosure);
  c.enclosure.present = all.convex && all.enclosure.set;
  if (!c.enclosure.present) c.enclosure = Extremum{0.0, 0, 0, true, false};
  return c;
}

Extremum interior_delta_star(const SampledHypersurface& s, const SearchOptions& o) {
  return delta_certificates(s, o).interior;
}

Extremum exterior_delta_star(const SampledHypersurface& s, const SearchOptions& o) {
  return delta_certificates(s, o).exterior;
}

Extremum enclosure_delta(const SampledHypersurface& s, const SearchOptions& o) {
  return delta_certificates(s, o).enclosure;
}

double vertex_delta_star(const SampledHypersurface& s, std::size_t x) {
  Partial p;
  visit_diagonal(s, x, p);
  for (std::size_t y = 0; y < s.size(); ++y)
    if (y != x) visit_pair(s, x, y, p);
  return p.interior.set ? p.interior.v : std::numeric_limits<double>::infinity();
}

double min_z(const SampledHypersurface& s, std::size_t x, double delta) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < s.size(); ++y)
    if (y != x) best = std::min(best, z_value(s, x, y, delta).z);
  return best;
}

PinchingSpectrum pinching_spectrum(const FlowState& st, double delta, Weight weight) {
  const auto& f = st.fields;
  const auto& w = weight == Weight::f_field ? f.f : f.H;
  const std::size_t n = f.H.size();
  PinchingSpectrum p;
  p.interior.resize(n);
  p.exterior.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    p.interior[i] = w[i] - delta * f.k_max(i);
    p.exterior[i] = w[i] + delta * f.k_min(i);
  }
  p.min_interior = *std::min_element(p.interior.begin(), p.interior.end());
  p.min_exterior = *std::min_element(p.exterior.begin(), p.exterior.end());
  return p;
}

BallCheck touching_ball_check(const FlowState& state, const SampledHypersurface& s, std::size_t x, double delta,
                              Side side) {
  if (!(delta > 0.0)) throw std::invalid_argument("touching_ball_check: delta must be positive");
  BallCheck c;
  c.radius = delta / s.weight[x];
  const double sign = side == Side::interior ? -1.0 : 1.0;
  c.centre = s.X[x] + s.nu[x] * (sign * c.radius);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t y = 0; y < s.size(); ++y)
    if (y != x) best = std::min(best, norm(s.X[y] - c.centre));
  c.clearance = best - c.radius;
  double rd = region_distance(state.geometry, c.centre);
  bool side_ok = side == Side::interior ? rd > 0.0 : rd < 0.0;
  c.avoids = c.clearance >= 0.0 && side_ok;
  return c;
}

NoncollapseReport report(const FlowState& st, const ReportOptions& o) {
  SampledHypersurface s = sample(st, o.weight);
  Certificates c = delta_certificates(s, o.search);
  NoncollapseReport r;
  r.t = st.t;
  r.f_certificate = o.weight == Weight::f_field;
  r.interior = c.interior;
  r.exterior = c.exterior;
  r.enclosure = c.enclosure;
  r.pinch_min_interior = pinching_spectrum(st, c.interior.value, o.weight).min_interior;
  if (c.exterior.finite) r.pinch_min_exterior = pinching_spectrum(st, c.exterior.value, o.weight).min_exterior;
  if (o.radii) {
    Radii radii = inradius_circumradius(st.geometry);
    r.r_in = radii.r_in;
    r.r_out = radii.r_out;
    r.in_center = radii.in_center;
    r.out_center = radii.out_center;
  }
  r.H_min = *std::min_element(st.fields.H.begin(), st.fields.H.end());
  r.H_max = *std::max_element(st.fields.H.begin(), st.fields.H.end());
  return r;
}

Certification verdicts(std::vector<NoncollapseReport> reports, double slack, double t_max) {
  Certification c;
  c.reports = std::move(reports);
  c.interior.quantity = "delta_interior non-decreasing";
  c.exterior.quantity = "delta_exterior non-decreasing";
  c.enclosure.quantity = "delta_enclosure non-increasing";
  const double inf = std::numeric_limits<double>::infinity();
  auto note = [](MonotonicityVerdict& v, double excess, std::size_t k) {
    ++v.compared;
    if (v.compared == 1 || excess > v.worst_violation) {
      v.worst_violation = excess;
      v.at = k;
    }
    if (excess > 0.0) v.passed = false;
  };
  for (std::size_t k = 1; k < c.reports.size(); ++k) {
    const auto& a = c.reports[k - 1];
    const auto& b = c.reports[k];
    if (b.t > t_max) break;
    const double tol_i = slack * (1.0 + std::abs(a.interior.value));
    note(c.interior, (a.interior.value - b.interior.value) - tol_i, k);
    if (a.exterior.finite && b.exterior.finite)
      note(c.exterior, (a.exterior.value - b.exterior.value) - slack * (1.0 + std::abs(a.exterior.value)), k);
    else if (!a.exterior.finite && b.exterior.finite)
      note(c.exterior, inf, k);
    if (a.enclosure.present && b.enclosure.present)
      note(c.enclosure, (b.enclosure.value - a.enclosure.value) - slack * (1.0 + std::abs(a.enclosure.value)), k);
    else if (a.enclosure.present && !b.enclosure.present)
      note(c.enclosure, inf, k);
  }
  return c;
}

Certification certify(const std::vector<FlowState>& snapshots, const CertifyOptions& o) {
  if (snapshots.empty()) throw std::invalid_argument("certify: empty trajectory");
  std::vector<NoncollapseReport> reports;
  reports.reserve(snapshots.size());
  for (const FlowState& s : snapshots) reports.push_back(report(s, o.report));
  return verdicts(std::move(reports), o.slack, o.t_max);
}

}  // namespace nclab
