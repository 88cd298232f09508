#include "meso/field.hpp"

#include <cmath>
#include <sstream>

namespace meso {

namespace {

std::string point_str(Point p, int dim) {
  std::ostringstream os;
  os << "(" << p[0];
  if (dim == 2) os << ", " << p[1];
  os << ")";
  return os.str();
}

void check_bounds(const SymTensor& t, double r, double M, Point where, int dim,
                  const char* what) {
  const double lo = t.min_eig();
  const double hi = t.max_eig();
  const double slack = 1e-9 * (1.0 + std::fabs(M));
  if (lo < r - slack || hi > M + slack) {
    std::ostringstream os;
    os << what << ": eigenvalues [" << lo << ", " << hi << "] outside declared ["
       << r << ", " << M << "] at " << point_str(where, dim);
    throw std::runtime_error(os.str());
  }
}

}  // namespace

void spot_check(const TensorField& f, int grid) {
  const int nj = f.dim == 2 ? grid : 1;
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < nj; ++j) {
      const Point x = {i / double(grid - 1), f.dim == 2 ? j / double(grid - 1) : 0.0};
      check_bounds(f.eval(x), f.ell_r, f.ell_M, x, f.dim, "TensorField");
    }
}

void spot_check(const ScaleSeparatedField& f, int x_grid, int lam_grid) {
  const int xj = f.dim == 2 ? x_grid : 1;
  const int lj = f.dim == 2 ? lam_grid : 1;
  const double per_tol = 1e-8 * (1.0 + std::fabs(f.ell_M));
  for (int i = 0; i < x_grid; ++i)
    for (int j = 0; j < xj; ++j) {
      const Point x = {i / double(x_grid - 1), f.dim == 2 ? j / double(x_grid - 1) : 0.0};
      for (int a = 0; a < lam_grid; ++a)
        for (int b = 0; b < lj; ++b) {
          const Point lam = {a / double(lam_grid), f.dim == 2 ? b / double(lam_grid) : 0.0};
          const SymTensor t = f.eval(x, lam);
          check_bounds(t, f.ell_r, f.ell_M, x, f.dim, "ScaleSeparatedField");
          for (int c = 0; c < f.dim; ++c) {
            Point shifted = lam;
            shifted[c] += 1.0;
            const SymTensor ts = f.eval(x, shifted);
            const double diff = (ts - t).norm2();
            if (diff > per_tol) {
              throw std::runtime_error("ScaleSeparatedField: not 1-periodic at x=" +
                                       point_str(x, f.dim) + " lambda=" +
                                       point_str(lam, f.dim));
            }
          }
        }
    }
}

}  // namespace meso
