#ifndef MESO_SPLINE_HPP
#define MESO_SPLINE_HPP

#include <vector>

namespace meso {

// Natural cubic spline through strictly increasing knots.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(std::vector<double> xs, std::vector<double> ys);

  double operator()(double x) const;  // clamped to the knot range

 private:
  std::vector<double> x_, y_, m_;  // m_: second derivatives at the knots
};

}  // namespace meso

#endif
