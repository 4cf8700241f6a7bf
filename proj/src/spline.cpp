#include "nclab/spline.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nclab {

PeriodicSpline::PeriodicSpline(std::vector<double> knots, std::vector<double> values, double period)
    : knots_(std::move(knots)), values_(std::move(values)), period_(period) {
  const std::size_t n = knots_.size();
  if (n < 3 || values_.size() != n) throw std::invalid_argument("PeriodicSpline: need >= 3 matching knots");

  // Cyclic tridiagonal system for the second derivatives M_i:
  //   h_{i-1} M_{i-1} + 2 (h_{i-1} + h_i) M_i + h_i M_{i+1} = 6 (slope_i - slope_{i-1})
  std::vector<double> h(n), a(n), b(n), c(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    double next = (i + 1 < n) ? knots_[i + 1] : knots_[0] + period_;
    h[i] = next - knots_[i];
    if (!(h[i] > 0.0)) throw std::invalid_argument("PeriodicSpline: knots must increase");
  }
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t im = (i + n - 1) % n, ip = (i + 1) % n;
    a[i] = h[im];
    b[i] = 2.0 * (h[im] + h[i]);
    c[i] = h[i];
    rhs[i] = 6.0 * ((values_[ip] - values_[i]) / h[i] - (values_[i] - values_[im]) / h[im]);
  }

  // Sherman-Morrison on the cyclic system.
  double gamma = -b[0];
  std::vector<double> bb(b);
  bb[0] -= gamma;
  bb[n - 1] -= a[0] * c[n - 1] / gamma;
  auto solve = [&](std::vector<double> d) {
    std::vector<double> cp(n), x(n);
    cp[0] = c[0] / bb[0];
    d[0] = d[0] / bb[0];
    for (std::size_t i = 1; i < n; ++i) {
      double m = bb[i] - a[i] * cp[i - 1];
      cp[i] = c[i] / m;
      d[i] = (d[i] - a[i] * d[i - 1]) / m;
    }
    x[n - 1] = d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = d[i] - cp[i] * x[i + 1];
    return x;
  };
  std::vector<double> y = solve(rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = c[n - 1];
  std::vector<double> z = solve(u);
  double factor = (y[0] + a[0] * y[n - 1] / gamma) / (1.0 + z[0] + a[0] * z[n - 1] / gamma);
  second_.resize(n);
  for (std::size_t i = 0; i < n; ++i) second_[i] = y[i] - factor * z[i];
}

std::size_t PeriodicSpline::segment(double& s) const {
  s -= period_ * std::floor((s - knots_[0]) / period_);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), s);
  return it == knots_.begin() ? 0 : std::size_t(it - knots_.begin()) - 1;
}

double PeriodicSpline::operator()(double s) const {
  std::size_t i = segment(s);
  std::size_t ip = (i + 1) % knots_.size();
  double next = (i + 1 < knots_.size()) ? knots_[i + 1] : knots_[0] + period_;
  double h = next - knots_[i];
  double A = (next - s) / h, B = (s - knots_[i]) / h;
  return A * values_[i] + B * values_[ip] + ((A * A * A - A) * second_[i] + (B * B * B - B) * second_[ip]) * h * h / 6.0;
}

double PeriodicSpline::derivative(double s) const {
  std::size_t i = segment(s);
  std::size_t ip = (i + 1) % knots_.size();
  double next = (i + 1 < knots_.size()) ? knots_[i + 1] : knots_[0] + period_;
  double h = next - knots_[i];
  double A = (next - s) / h, B = (s - knots_[i]) / h;
  return (values_[ip] - values_[i]) / h - (3.0 * A * A - 1.0) * h * second_[i] / 6.0 +
         (3.0 * B * B - 1.0) * h * second_[ip] / 6.0;
}

}  // namespace nclab
