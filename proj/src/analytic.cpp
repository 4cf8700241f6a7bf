#include "nclab/analytic.hpp"

#include <algorithm>
#include <stdexcept>

namespace nclab {

namespace {

template <class S>
Dual<S> seed1(const S& x, bool on) {
  return {x, S(on ? 1.0 : 0.0)};
}

// 20-point Gauss-Legendre nodes on [-1, 1] (positive half).
constexpr double kGLNodes[10] = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195, 0.5108670019508271,
    0.6360536807265150, 0.7463319064601508, 0.8391169718222188, 0.9122344282513259,
    0.9639719272779138, 0.9931285991850949};
constexpr double kGLWeights[10] = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820, 0.1316886384491766,
    0.1181945319615184, 0.1019301198172404, 0.0832767415767048, 0.0626720483341091,
    0.0406014298003869, 0.0176140071391521};

template <class F>
double gauss_legendre(F&& f, double a, double b) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a), sum = 0.0;
  for (int k = 0; k < 10; ++k) sum += kGLWeights[k] * (f(mid + half * kGLNodes[k]) + f(mid - half * kGLNodes[k]));
  return sum * half;
}

}  // namespace

int AnalyticSurface::dim() const {
  return std::visit([](const auto& s) { return std::decay_t<decltype(s)>::dim; }, shape_);
}

std::string AnalyticSurface::name() const {
  struct Namer {
    std::string operator()(const CircleShape& s) const { return "circle(" + std::to_string(s.radius) + ")"; }
    std::string operator()(const EllipseShape& s) const {
      return "ellipse(" + std::to_string(s.a) + "," + std::to_string(s.b) + ")";
    }
    std::string operator()(const FourierShape&) const { return "fourier"; }
    std::string operator()(const SphereShape& s) const { return "sphere(" + std::to_string(s.radius) + ")"; }
    std::string operator()(const EllipsoidShape& s) const {
      return "ellipsoid(" + std::to_string(s.a) + "," + std::to_string(s.c) + ")";
    }
    std::string operator()(const TorusShape& s) const {
      return "torus(" + std::to_string(s.major) + "," + std::to_string(s.minor) + ")";
    }
  };
  return std::visit(Namer{}, shape_);
}

Vec3 AnalyticSurface::position(const Param& p) const {
  return std::visit([&](const auto& s) { return s.position(p.u, p.v); }, shape_);
}

Vec3 AnalyticSurface::d1(const Param& p, int a) const {
  return std::visit(
      [&](const auto& s) {
        auto x = s.position(seed1(p.u, a == 0), seed1(p.v, a == 1));
        return Vec3{x.x.d, x.y.d, x.z.d};
      },
      shape_);
}

Vec3 AnalyticSurface::d2(const Param& p, int a, int b) const {
  return std::visit(
      [&](const auto& s) {
        auto jet = surface_jet(s, p.u, p.v);
        return jet.ddX[a][b];
      },
      shape_);
}

Vec3 AnalyticSurface::d3(const Param& p, int a, int b, int c) const {
  using D3 = Dual<Dual<Dual<double>>>;
  auto seed = [&](double x, int k) {
    D3 out;
    out.v.v.v = x;
    out.v.v.d = (a == k) ? 1.0 : 0.0;
    out.v.d.v = (b == k) ? 1.0 : 0.0;
    out.d.v.v = (c == k) ? 1.0 : 0.0;
    return out;
  };
  return std::visit(
      [&](const auto& s) {
        auto x = s.position(seed(p.u, 0), seed(p.v, 1));
        return Vec3{x.x.d.d.d, x.y.d.d.d, x.z.d.d.d};
      },
      shape_);
}

LocalGeometryT<double> AnalyticSurface::local(const Param& p) const {
  return std::visit([&](const auto& s) { return local_geometry(s, p.u, p.v); }, shape_);
}

NormalChart AnalyticSurface::chart(const Param& p) const {
  return std::visit([&](const auto& s) { return make_normal_chart(s, p); }, shape_);
}

ChartGeometryT<long double> AnalyticSurface::chart_geometry_ld(const NormalChart& c,
                                                               const std::array<long double, 2>& w) const {
  return std::visit([&](const auto& s) { return chart_geometry<long double>(s, c, w); }, shape_);
}

PointData AnalyticSurface::point(const Param& p) const {
  return std::visit(
      [&](const auto& s) {
        using Shape = std::decay_t<decltype(s)>;
        constexpr int n = Shape::dim;
        NormalChart c = make_normal_chart(s, p);
        PointData pd;
        pd.dim = n;
        ChartGeometryT<double> base = chart_geometry<double>(s, c, {0.0, 0.0});
        pd.X = base.X;
        pd.nu = base.nu;
        pd.H = base.H;
        for (int i = 0; i < n; ++i) {
          pd.frame[i] = base.frame[i];
          for (int j = 0; j < n; ++j) pd.h[i][j] = base.h[i][j];
        }
        using D = Dual<double>;
        using DD = Dual<D>;
        for (int j = 0; j < n; ++j) {
          std::array<D, 2> w{D{0.0, j == 0 ? 1.0 : 0.0}, D{0.0, j == 1 ? 1.0 : 0.0}};
          ChartGeometryT<D> g1 = chart_geometry<D>(s, c, w);
          pd.grad_H[j] = g1.H.d;
          for (int i = 0; i < n; ++i)
            for (int q = 0; q < n; ++q) pd.grad_h[j][i][q] = g1.h[i][q].d;
          for (int i = 0; i < n; ++i) {
            std::array<DD, 2> ww;
            for (int k = 0; k < 2; ++k) {
              ww[k].v = D{0.0, i == k ? 1.0 : 0.0};
              ww[k].d = D{j == k ? 1.0 : 0.0, 0.0};
            }
            ChartGeometryT<DD> g2 = chart_geometry<DD>(s, c, ww);
            pd.hess_H[j][i] = g2.H.d.d;
          }
        }
        if (n == 1) {
          pd.k_min = pd.k_max = pd.h[0][0];
          pd.norm_A2 = pd.h[0][0] * pd.h[0][0];
        } else {
          double tr = pd.h[0][0] + pd.h[1][1];
          double diff = 0.5 * (pd.h[0][0] - pd.h[1][1]);
          double disc = std::sqrt(diff * diff + pd.h[0][1] * pd.h[0][1]);
          pd.k_min = 0.5 * tr - disc;
          pd.k_max = 0.5 * tr + disc;
          pd.norm_A2 = pd.h[0][0] * pd.h[0][0] + 2.0 * pd.h[0][1] * pd.h[0][1] + pd.h[1][1] * pd.h[1][1];
        }
        return pd;
      },
      shape_);
}

std::vector<Param> AnalyticSurface::profile_params(int count) const {
  if (count < 2) throw std::invalid_argument("profile_params: need at least two samples");
  bool open_profile = std::holds_alternative<SphereShape>(shape_) || std::holds_alternative<EllipsoidShape>(shape_);
  double u_end = open_profile ? kPi : 2.0 * kPi;
  auto speed = [&](double u) { return norm(d1(Param{u, 0.0}, 0)); };

  // Cumulative arclength on a fine grid, then invert by Newton.
  const int fine = std::max(4096, 16 * count);
  std::vector<double> grid(fine + 1), cum(fine + 1, 0.0);
  for (int k = 0; k <= fine; ++k) grid[k] = u_end * k / fine;
  for (int k = 0; k < fine; ++k) cum[k + 1] = cum[k] + gauss_legendre(speed, grid[k], grid[k + 1]);
  const double total = cum[fine];
  const int intervals = open_profile ? count - 1 : count;

  std::vector<Param> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    double target = total * i / intervals;
    if (open_profile && i == count - 1) {
      out.push_back({u_end, 0.0});
      continue;
    }
    auto it = std::upper_bound(cum.begin(), cum.end(), target);
    int k = std::clamp(int(it - cum.begin()) - 1, 0, fine - 1);
    double u = grid[k];
    for (int iter = 0; iter < 30; ++iter) {
      double s = cum[k] + gauss_legendre(speed, grid[k], u);
      double step = (s - target) / speed(u);
      u -= step;
      if (std::abs(step) < 1e-15) break;
    }
    out.push_back({u, 0.0});
  }
  return out;
}

}  // namespace nclab
