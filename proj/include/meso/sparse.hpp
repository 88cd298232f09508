#ifndef MESO_SPARSE_HPP
#define MESO_SPARSE_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace meso {

// Compressed-row symmetric sparse matrix (both triangles stored).
struct CsrMatrix {
  int n = 0;
  std::vector<int> ptr, col;
  std::vector<double> val;

  // Build the sparsity pattern from per-row neighbor lists (must include the
  // diagonal); values start at zero.
  static CsrMatrix from_pattern(std::vector<std::vector<int>>& rows);

  double& at(int i, int j);  // existing entry only
  void multiply(const double* x, double* y) const;
  std::vector<double> multiply(const std::vector<double>& x) const;
  std::vector<double> row_sums() const;
};

struct SolveStats {
  int iterations = 0;
  double rel_residual = 0.0;
};

// Jacobi-preconditioned conjugate gradients. Deterministic. Throws
// std::runtime_error quoting the final residual if the iteration cap
// (20*sqrt(n) + 1000) is exceeded before ||b - Ax|| <= rel_tol * ||b||.
std::vector<double> pcg_solve(const CsrMatrix& a, const std::vector<double>& b,
                              double rel_tol, SolveStats* stats = nullptr);

// Conjugate gradients in the mean-free subspace for the singular periodic
// problem: both b and the iterates are projected against the constant vector.
std::vector<double> pcg_solve_meanfree(const CsrMatrix& a, std::vector<double> b,
                                       double rel_tol, SolveStats* stats = nullptr);

// Direct LDL^T solve for tridiagonal SPD systems (1D meshes).
std::vector<double> tridiag_solve(const CsrMatrix& a, const std::vector<double>& b);

}  // namespace meso

#endif
