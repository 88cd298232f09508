#ifndef MESO_TENSOR_HPP
#define MESO_TENSOR_HPP

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace meso {

// Point in the macroscopic domain or on the unit torus. 1D uses [0] only.
using Point = std::array<double, 2>;

inline Point operator+(Point a, Point b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Point operator-(Point a, Point b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Point operator*(double s, Point a) { return {s * a[0], s * a[1]}; }

// Symmetric d x d tensor, d in {1, 2}. a12/a22 are ignored when dim == 1.
struct SymTensor {
  int dim = 2;
  double a11 = 0.0, a12 = 0.0, a22 = 0.0;

  static SymTensor scalar1d(double a) { return {1, a, 0.0, 0.0}; }
  static SymTensor isotropic(int dim, double a) { return {dim, a, 0.0, a}; }
  static SymTensor diag(double a, double b) { return {2, a, 0.0, b}; }

  // A * v
  Point apply(Point v) const {
    if (dim == 1) return {a11 * v[0], 0.0};
    return {a11 * v[0] + a12 * v[1], a12 * v[0] + a22 * v[1]};
  }

  double min_eig() const {
    if (dim == 1) return a11;
    const double tr = a11 + a22;
    const double det = a11 * a22 - a12 * a12;
    const double disc = std::sqrt(std::fmax(tr * tr / 4.0 - det, 0.0));
    return tr / 2.0 - disc;
  }

  double max_eig() const {
    if (dim == 1) return a11;
    const double tr = a11 + a22;
    const double det = a11 * a22 - a12 * a12;
    const double disc = std::sqrt(std::fmax(tr * tr / 4.0 - det, 0.0));
    return tr / 2.0 + disc;
  }

  // Spectral norm (tensors here are symmetric).
  double norm2() const {
    if (dim == 1) return std::fabs(a11);
    return std::fmax(std::fabs(min_eig()), std::fabs(max_eig()));
  }

  SymTensor operator+(const SymTensor& o) const {
    return {dim, a11 + o.a11, a12 + o.a12, a22 + o.a22};
  }
  SymTensor operator-(const SymTensor& o) const {
    return {dim, a11 - o.a11, a12 - o.a12, a22 - o.a22};
  }
  SymTensor operator*(double s) const { return {dim, s * a11, s * a12, s * a22}; }
};

inline SymTensor operator*(double s, const SymTensor& t) { return t * s; }

// U_theta = [[c, s], [-s, c]]; returns U^T A U (frame change into the rotated basis).
inline SymTensor rotate_into(const SymTensor& a, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  // U^T A U with U = [[c, s], [-s, c]]
  const double b11 = c * (c * a.a11 - s * a.a12) - s * (c * a.a12 - s * a.a22);
  const double b12 = c * (s * a.a11 + c * a.a12) - s * (s * a.a12 + c * a.a22);
  const double b22 = s * (s * a.a11 + c * a.a12) + c * (s * a.a12 + c * a.a22);
  return {2, b11, b12, b22};
}

// U A U^T, inverse frame change of rotate_into.
inline SymTensor rotate_from(const SymTensor& a, double theta) {
  return rotate_into(a, -theta);
}

}  // namespace meso

#endif
