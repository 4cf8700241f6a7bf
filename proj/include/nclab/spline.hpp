#pragma once

#include <span>
#include <vector>

namespace nclab {

/// Interpolating periodic cubic spline. Knots s_0 = 0 < s_1 < ... < s_{n-1} < period.
class PeriodicSpline {
 public:
  PeriodicSpline(std::vector<double> knots, std::vector<double> values, double period);

  double operator()(double s) const;
  double derivative(double s) const;
  double period() const { return period_; }

 private:
  std::size_t segment(double& s) const;

  std::vector<double> knots_, values_, second_;
  double period_;
};

}  // namespace nclab
