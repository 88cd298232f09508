#include "meso/dilation.hpp"

#include <cmath>

namespace meso {

double anchor(double y, const DilationParams& p) {
  return (std::floor(y / p.L) + p.nu) * p.L;
}

double shrink(double y, const DilationParams& p) {
  const double a = anchor(y, p);
  return (y - a) / p.m + a;
}

Point shrink(Point x, const DilationParams& p, int dim) {
  Point out = x;
  for (int i = 0; i < dim; ++i) out[i] = shrink(x[i], p);
  return out;
}

TensorField dilate_local(const TensorField& field, const DilationParams& p) {
  p.require_tiling();
  TensorField out;
  out.dim = field.dim;
  out.ell_r = field.ell_r;  // reparameterization cannot change the value range
  out.ell_M = field.ell_M;
  out.eval = [base = field.eval, p, dim = field.dim](Point x) {
    return base(shrink(x, p, dim));
  };
  return out;
}

TensorField wrap(const ScaleSeparatedField& a, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("wrap: eps must be positive");
  TensorField out;
  out.dim = a.dim;
  out.ell_r = a.ell_r;
  out.ell_M = a.ell_M;
  out.eval = [base = a.eval, eps](Point x) {
    return base(x, {x[0] / eps, x[1] / eps});
  };
  return out;
}

ScaleSeparatedField dilate_partial(const ScaleSeparatedField& a, double m) {
  if (!(m >= 1.0)) throw std::invalid_argument("dilate_partial: m must be >= 1");
  ScaleSeparatedField out = a;
  out.eval = [base = a.eval, m](Point x, Point lam) {
    return base(x, {lam[0] / m, lam[1] / m});
  };
  return out;
}

TensorField dilate_structure_aware(const StructuredField& field, const DilationParams& p) {
  const TensorField dil_osc = dilate_local(field.oscillation, p);
  TensorField out;
  out.dim = field.structure.dim;
  // Weyl bounds: eigenvalues of a sum are bracketed by the sums of bounds
  out.ell_r = field.structure.ell_r + field.oscillation.ell_r;
  out.ell_M = field.structure.ell_M + field.oscillation.ell_M;
  out.eval = [s = field.structure.eval, o = dil_osc.eval](Point x) {
    return s(x) + o(x);
  };
  return out;
}

ScaleSeparatedField represent_dilated(const ScaleSeparatedField& a, double eps,
                                      const DilationParams& p) {
  p.require_tiling();
  if (!(eps > 0.0)) throw std::invalid_argument("represent_dilated: eps must be positive");
  ScaleSeparatedField out = a;
  out.eval = [base = a.eval, p, eps, dim = a.dim](Point x, Point lam) {
    Point xs = x, shift = {0.0, 0.0};
    for (int i = 0; i < dim; ++i) {
      const double k = std::floor(x[i] / p.L);
      xs[i] = shrink(x[i], p);
      shift[i] = (1.0 - 1.0 / p.m) * (k + p.nu) * p.L / eps;
    }
    return base(xs, lam + shift);
  };
  return out;
}

}  // namespace meso
