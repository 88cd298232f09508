#ifndef MESO_HOMOGENIZE_HPP
#define MESO_HOMOGENIZE_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "meso/field.hpp"

namespace meso {

// Map lambda -> tensor on the unit torus (the coefficient at one frozen x).
using CellCoefficient = std::function<SymTensor(Point)>;

// First-order corrector chi = (chi_1, chi_2) on a periodic n x n
// triangulation of the unit torus; nodal values are mean-zero, one unknown
// per identified node.
struct CorrectorField {
  int n = 0;
  std::vector<double> chi1, chi2;  // n*n nodal values each

  double mean(int l) const;
  // sampled variance of chi_l across the lambda_2 direction (diagnostic for
  // layered cells, where chi_1 depends on lambda_1 only)
  double cross_variance(int l) const;
};

// 1D homogenized coefficient [ integral_0^1 A(x,lambda)^-1 dlambda ]^-1 by
// composite-midpoint quadrature of the reciprocal.
double harmonic_mean_1d(const ScaleSeparatedField& a, double x, int n_quad);

// Closed form for layered materials: A depends on lambda only through the
// rotated coordinate t = lambda_1 cos(theta) - lambda_2 sin(theta). The
// formula is applied in the rotated frame and rotated back.
SymTensor layered_closed_form(const ScaleSeparatedField& a, double theta, Point x,
                              int n_quad = 256);

// P1 FEM for the periodic cell problem -div_l(A grad_l chi_l) = div_l(a_l)
// on an n x n torus mesh; mean-zero constraint enforced by projection.
CorrectorField solve_cell_problem(const CellCoefficient& a_at_x, int n);

// Homogenized tensor: torus quadrature of A + A grad(chi)^T, symmetrized.
SymTensor homogenized_tensor(const CellCoefficient& a_at_x, int n);

// Coarse-grid tabulation of the homogenized tensor with bilinear
// interpolation at query points.
struct TensorTable {
  int grid_n = 0;                 // points per side over [0,1]^2
  std::vector<SymTensor> tensors; // row-major, y outer

  SymTensor interpolate(Point x) const;
  TensorField as_field() const;
  void write_csv(std::ostream& os) const;  // x1,x2,a11,a12,a22
};

TensorTable tensor_table(const ScaleSeparatedField& a, int grid_n, int cell_n);

}  // namespace meso

#endif
