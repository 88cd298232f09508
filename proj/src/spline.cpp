#include "meso/spline.hpp"

#include <algorithm>
#include <stdexcept>

namespace meso {

CubicSpline::CubicSpline(std::vector<double> xs, std::vector<double> ys)
    : x_(std::move(xs)), y_(std::move(ys)) {
  const int n = int(x_.size());
  if (n < 2 || y_.size() != x_.size())
    throw std::invalid_argument("CubicSpline: need >= 2 matching knots");
  for (int i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1]))
      throw std::invalid_argument("CubicSpline: knots must be strictly increasing");
  m_.assign(n, 0.0);
  if (n == 2) return;  // degenerates to a line

  // tridiagonal system for the interior second derivatives, natural BCs
  std::vector<double> diag(n, 0.0), rhs(n, 0.0), sub(n, 0.0), sup(n, 0.0);
  for (int i = 1; i < n - 1; ++i) {
    const double hl = x_[i] - x_[i - 1], hr = x_[i + 1] - x_[i];
    sub[i] = hl / 6.0;
    diag[i] = (hl + hr) / 3.0;
    sup[i] = hr / 6.0;
    rhs[i] = (y_[i + 1] - y_[i]) / hr - (y_[i] - y_[i - 1]) / hl;
  }
  for (int i = 2; i < n - 1; ++i) {
    const double w = sub[i] / diag[i - 1];
    diag[i] -= w * sup[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  for (int i = n - 2; i >= 1; --i)
    m_[i] = (rhs[i] - sup[i] * m_[i + 1]) / diag[i];
}

double CubicSpline::operator()(double x) const {
  const int n = int(x_.size());
  if (x <= x_.front()) x = x_.front();
  if (x >= x_.back()) x = x_.back();
  const int k =
      int(std::upper_bound(x_.begin(), x_.end(), x) - x_.begin()) - 1;
  const int i = std::clamp(k, 0, n - 2);
  const double h = x_[i + 1] - x_[i];
  const double a = (x_[i + 1] - x) / h, b = (x - x_[i]) / h;
  return a * y_[i] + b * y_[i + 1] +
         ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
}

}  // namespace meso
