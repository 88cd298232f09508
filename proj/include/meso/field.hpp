#ifndef MESO_FIELD_HPP
#define MESO_FIELD_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>

#include "meso/tensor.hpp"

namespace meso {

// Single-argument coefficient field over Omega = [0,1]^d. Fields are closures;
// sampling happens only at quadrature time.
struct TensorField {
  int dim = 2;
  std::function<SymTensor(Point)> eval;
  // declared ellipticity constants (Assumption-style: r <= eig <= M on samples)
  double ell_r = 0.0;
  double ell_M = 0.0;

  SymTensor operator()(Point x) const { return eval(x); }
};

// Two-argument field A(x, lambda), 1-periodic in lambda.
struct ScaleSeparatedField {
  int dim = 2;
  std::function<SymTensor(Point, Point)> eval;
  double ell_r = 0.0;
  double ell_M = 0.0;

  SymTensor operator()(Point x, Point lam) const { return eval(x, lam); }
};

// Decomposed field A = A_s(x) + A_o(x, x/eps). The pieces individually need
// not be elliptic; the sum must be.
struct StructuredField {
  TensorField structure;    // slowly varying, may contain channels
  TensorField oscillation;  // wrapped oscillatory remainder
};

// Parameters (L, m, nu) of the anchor/shrinkage/dilation family.
struct DilationParams {
  double L = 0.1;   // mesoscopic length
  double m = 2.0;   // scaling factor, >= 1
  double nu = 0.5;  // anchoring factor in [0, 1]

  void validate() const {
    if (!(L > 0.0)) throw std::invalid_argument("DilationParams: L must be positive");
    if (!(m >= 1.0)) throw std::invalid_argument("DilationParams: m must be >= 1");
    if (!(nu >= 0.0 && nu <= 1.0))
      throw std::invalid_argument("DilationParams: nu must be in [0, 1]");
  }

  // whether 1/L is a positive integer, so the cells {T_k} tile [0,1]^d
  bool tiles_unit_domain(double tol = 1e-9) const {
    const double inv = 1.0 / L;
    return std::fabs(inv - std::round(inv)) < tol && std::round(inv) >= 1.0;
  }

  void require_tiling() const {
    validate();
    if (!tiles_unit_domain())
      throw std::invalid_argument("DilationParams: 1/L must be a positive integer");
  }
};

// Spot-check of declared symmetry/ellipticity/periodicity on a sample grid.
// Throws std::runtime_error naming the first offending sample.
void spot_check(const TensorField& f, int grid = 33);
void spot_check(const ScaleSeparatedField& f, int x_grid = 33, int lam_grid = 33);

}  // namespace meso

#endif
