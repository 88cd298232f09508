#include "meso/sparse.hpp"

#include <algorithm>
#include <cmath>

namespace meso {

CsrMatrix CsrMatrix::from_pattern(std::vector<std::vector<int>>& rows) {
  CsrMatrix m;
  m.n = int(rows.size());
  m.ptr.resize(m.n + 1, 0);
  for (int i = 0; i < m.n; ++i) {
    auto& r = rows[i];
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    m.ptr[i + 1] = m.ptr[i] + int(r.size());
  }
  m.col.reserve(m.ptr[m.n]);
  for (const auto& r : rows) m.col.insert(m.col.end(), r.begin(), r.end());
  m.val.assign(m.ptr[m.n], 0.0);
  return m;
}

double& CsrMatrix::at(int i, int j) {
  const auto begin = col.begin() + ptr[i], end = col.begin() + ptr[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) throw std::runtime_error("CsrMatrix::at: entry not in pattern");
  return val[it - col.begin()];
}

void CsrMatrix::multiply(const double* x, double* y) const {
  for (int i = 0; i < n; ++i) {
    double s = 0.0;
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s += val[k] * x[col[k]];
    y[i] = s;
  }
}

std::vector<double> CsrMatrix::multiply(const std::vector<double>& x) const {
  std::vector<double> y(n);
  multiply(x.data(), y.data());
  return y;
}

std::vector<double> CsrMatrix::row_sums() const {
  std::vector<double> s(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int k = ptr[i]; k < ptr[i + 1]; ++k) s[i] += val[k];
  return s;
}

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

void project_mean(std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  for (double& x : v) x -= mean;
}

std::vector<double> pcg_impl(const CsrMatrix& a, const std::vector<double>& b,
                             double rel_tol, bool meanfree, SolveStats* stats) {
  const int n = a.n;
  std::vector<double> inv_diag(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k)
      if (a.col[k] == i && a.val[k] != 0.0) inv_diag[i] = 1.0 / a.val[k];

  std::vector<double> x(n, 0.0), r = b, z(n), p(n), q(n);
  if (meanfree) project_mean(r);
  const double norm_b = norm(r);
  if (norm_b == 0.0) {
    if (stats) *stats = {0, 0.0};
    return x;
  }
  const int cap = int(20.0 * std::sqrt(double(n))) + 1000;

  for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
  if (meanfree) project_mean(z);
  p = z;
  double rho = dot(r, z);
  double res = norm(r);
  int it = 0;
  while (res > rel_tol * norm_b && it < cap) {
    if (rho == 0.0) break;  // residual exactly zero, nothing left to reduce
    a.multiply(p.data(), q.data());
    const double pq = dot(p, q);
    if (pq <= 0.0) break;  // direction left the positive-definite range
    const double alpha = rho / pq;
    for (int i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    if (meanfree) project_mean(r);
    for (int i = 0; i < n; ++i) z[i] = inv_diag[i] * r[i];
    if (meanfree) project_mean(z);
    const double rho_new = dot(r, z);
    const double beta = rho_new / rho;
    rho = rho_new;
    for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    res = norm(r);
    ++it;
  }
  if (meanfree) project_mean(x);
  if (stats) *stats = {it, res / norm_b};
  if (res > rel_tol * norm_b)
    throw std::runtime_error("pcg_solve: iteration cap " + std::to_string(cap) +
                             " reached, relative residual " + std::to_string(res / norm_b));
  return x;
}

}  // namespace

std::vector<double> pcg_solve(const CsrMatrix& a, const std::vector<double>& b,
                              double rel_tol, SolveStats* stats) {
  return pcg_impl(a, b, rel_tol, false, stats);
}

std::vector<double> pcg_solve_meanfree(const CsrMatrix& a, std::vector<double> b,
                                       double rel_tol, SolveStats* stats) {
  project_mean(b);
  return pcg_impl(a, b, rel_tol, true, stats);
}

std::vector<double> tridiag_solve(const CsrMatrix& a, const std::vector<double>& b) {
  const int n = a.n;
  std::vector<double> diag(n, 0.0), sub(n, 0.0);  // sub[i] = A(i, i-1)
  for (int i = 0; i < n; ++i)
    for (int k = a.ptr[i]; k < a.ptr[i + 1]; ++k) {
      if (a.col[k] == i) diag[i] = a.val[k];
      if (a.col[k] == i - 1) sub[i] = a.val[k];
      if (std::abs(a.col[k] - i) > 1 && a.val[k] != 0.0)
        throw std::runtime_error("tridiag_solve: matrix is not tridiagonal");
    }
  // LDL^T factorization
  std::vector<double> d(n), l(n, 0.0);
  d[0] = diag[0];
  for (int i = 1; i < n; ++i) {
    l[i] = sub[i] / d[i - 1];
    d[i] = diag[i] - l[i] * sub[i];
  }
  std::vector<double> x = b;
  for (int i = 1; i < n; ++i) x[i] -= l[i] * x[i - 1];
  for (int i = 0; i < n; ++i) x[i] /= d[i];
  for (int i = n - 2; i >= 0; --i) x[i] -= l[i + 1] * x[i + 1];
  return x;
}

}  // namespace meso
