#include "meso/homogenize.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

#include "meso/parallel.hpp"
#include "meso/sparse.hpp"

namespace meso {

namespace {

// the two triangles of torus square (i, j), unit geometry scaled by h = 1/n:
// lower covers fx >= fy, upper the rest; basis gradients are constant
struct TorusElement {
  int node[3];
  Point grad[3];
  Point centroid;
};

class TorusMesh {
 public:
  explicit TorusMesh(int n) : n_(n) {
    if (n < 8) throw std::invalid_argument("cell problem mesh: n must be >= 8");
    const double h = 1.0 / n;
    elements_.reserve(2 * size_t(n) * n);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const int v00 = id(i, j), v10 = id(i + 1, j);
        const int v01 = id(i, j + 1), v11 = id(i + 1, j + 1);
        TorusElement lo, up;
        lo.node[0] = v00; lo.node[1] = v10; lo.node[2] = v11;
        lo.grad[0] = {-n * 1.0, 0.0};
        lo.grad[1] = {n * 1.0, -n * 1.0};
        lo.grad[2] = {0.0, n * 1.0};
        lo.centroid = {(i + 2.0 / 3.0) * h, (j + 1.0 / 3.0) * h};
        up.node[0] = v00; up.node[1] = v11; up.node[2] = v01;
        up.grad[0] = {0.0, -n * 1.0};
        up.grad[1] = {n * 1.0, 0.0};
        up.grad[2] = {-n * 1.0, n * 1.0};
        up.centroid = {(i + 1.0 / 3.0) * h, (j + 2.0 / 3.0) * h};
        elements_.push_back(lo);
        elements_.push_back(up);
      }
  }

  int id(int i, int j) const { return (j % n_) * n_ + (i % n_); }
  int n() const { return n_; }
  int num_nodes() const { return n_ * n_; }
  double measure() const { return 0.5 / (double(n_) * n_); }
  const std::vector<TorusElement>& elements() const { return elements_; }

 private:
  int n_;
  std::vector<TorusElement> elements_;
};

SymTensor checked_cell_coefficient(const CellCoefficient& a, Point lam) {
  const SymTensor t = a(lam);
  if (!(t.min_eig() > 0.0))
    throw std::runtime_error("cell problem: coefficient not elliptic on the torus");
  return t;
}

}  // namespace

double CorrectorField::mean(int l) const {
  const auto& v = l == 0 ? chi1 : chi2;
  double s = 0.0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double CorrectorField::cross_variance(int l) const {
  const auto& v = l == 0 ? chi1 : chi2;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    double mean = 0.0;
    for (int j = 0; j < n; ++j) mean += v[j * n + i];
    mean /= n;
    for (int j = 0; j < n; ++j) {
      const double d = v[j * n + i] - mean;
      acc += d * d;
    }
  }
  return acc / double(n * n);
}

double harmonic_mean_1d(const ScaleSeparatedField& a, double x, int n_quad) {
  if (n_quad < 2) throw std::invalid_argument("harmonic_mean_1d: n_quad must be >= 2");
  double acc = 0.0;
  for (int k = 0; k < n_quad; ++k) {
    const double lam = (k + 0.5) / n_quad;
    const double v = a.eval({x, 0.0}, {lam, 0.0}).a11;
    if (!(v > 0.0))
      throw std::runtime_error("harmonic_mean_1d: non-positive sample at lambda=" +
                               std::to_string(lam));
    acc += 1.0 / v;
  }
  return double(n_quad) / acc;
}

SymTensor layered_closed_form(const ScaleSeparatedField& a, double theta, Point x,
                              int n_quad) {
  if (a.dim != 2) throw std::invalid_argument("layered_closed_form: 2D fields only");
  const double c = std::cos(theta), s = std::sin(theta);
  const auto rotated_sample = [&](double t, double offset) {
    // lambda = U_theta (t, offset)^T, so the layer coordinate equals t
    const Point lam = {c * t + s * offset, -s * t + c * offset};
    return rotate_into(a.eval(x, lam), theta);
  };

  // reject fields with genuine dependence on the transverse fast coordinate
  for (int k = 0; k < 8; ++k) {
    const double t = (k + 0.5) / 8.0;
    const SymTensor b0 = rotated_sample(t, 0.0);
    for (double offset : {0.37, 0.71}) {
      const SymTensor d = rotated_sample(t, offset) - b0;
      if (d.norm2() > 1e-8 * (1.0 + b0.norm2()))
        throw std::runtime_error("layered_closed_form: field is not layered for this theta");
    }
  }

  double inv11 = 0.0, ratio12 = 0.0, schur = 0.0;
  for (int k = 0; k < n_quad; ++k) {
    const SymTensor b = rotated_sample((k + 0.5) / n_quad, 0.0);
    if (!(b.a11 > 0.0))
      throw std::runtime_error("layered_closed_form: non-positive layer-normal entry");
    inv11 += 1.0 / b.a11;
    ratio12 += b.a12 / b.a11;
    schur += b.a22 - b.a12 * b.a12 / b.a11;
  }
  inv11 /= n_quad;
  ratio12 /= n_quad;
  schur /= n_quad;

  SymTensor hbar;
  hbar.dim = 2;
  hbar.a11 = 1.0 / inv11;
  hbar.a12 = ratio12 / inv11;
  hbar.a22 = schur + hbar.a12 * hbar.a12 / hbar.a11;
  return rotate_from(hbar, theta);
}

CorrectorField solve_cell_problem(const CellCoefficient& a_at_x, int n) {
  const TorusMesh mesh(n);
  const int nn = mesh.num_nodes();

  std::vector<std::vector<int>> rows(nn);
  for (auto& r : rows) r.reserve(8);
  for (const auto& el : mesh.elements())
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) rows[el.node[a]].push_back(el.node[b]);
  CsrMatrix K = CsrMatrix::from_pattern(rows);

  std::vector<double> rhs1(nn, 0.0), rhs2(nn, 0.0);
  const double meas = mesh.measure();
  for (const auto& el : mesh.elements()) {
    const SymTensor a = checked_cell_coefficient(a_at_x, el.centroid);
    const Point col1 = {a.a11, a.a12}, col2 = {a.a12, a.a22};
    for (int ai = 0; ai < 3; ++ai) {
      const Point ag = a.apply(el.grad[ai]);
      for (int bi = 0; bi < 3; ++bi)
        K.at(el.node[ai], el.node[bi]) += meas * (ag[0] * el.grad[bi][0] + ag[1] * el.grad[bi][1]);
      rhs1[el.node[ai]] -= meas * (col1[0] * el.grad[ai][0] + col1[1] * el.grad[ai][1]);
      rhs2[el.node[ai]] -= meas * (col2[0] * el.grad[ai][0] + col2[1] * el.grad[ai][1]);
    }
  }

  CorrectorField chi;
  chi.n = n;
  chi.chi1 = pcg_solve_meanfree(K, rhs1, 1e-10);
  chi.chi2 = pcg_solve_meanfree(K, rhs2, 1e-10);
  return chi;
}

SymTensor homogenized_tensor(const CellCoefficient& a_at_x, int n) {
  const TorusMesh mesh(n);
  const CorrectorField chi = solve_cell_problem(a_at_x, n);
  double t11 = 0.0, t12 = 0.0, t21 = 0.0, t22 = 0.0;
  const double meas = mesh.measure();
  for (const auto& el : mesh.elements()) {
    const SymTensor a = a_at_x(el.centroid);
    Point g1 = {0.0, 0.0}, g2 = {0.0, 0.0};  // grad chi_1, grad chi_2 on the element
    for (int ai = 0; ai < 3; ++ai) {
      g1 = g1 + chi.chi1[el.node[ai]] * el.grad[ai];
      g2 = g2 + chi.chi2[el.node[ai]] * el.grad[ai];
    }
    const Point c1 = a.apply({1.0 + g1[0], g1[1]});  // A (e_1 + grad chi_1)
    const Point c2 = a.apply({g2[0], 1.0 + g2[1]});  // A (e_2 + grad chi_2)
    t11 += meas * c1[0];
    t21 += meas * c1[1];
    t12 += meas * c2[0];
    t22 += meas * c2[1];
  }
  SymTensor out;
  out.dim = 2;
  out.a11 = t11;
  out.a22 = t22;
  out.a12 = (t12 + t21) / 2.0;  // kill quadrature asymmetry
  return out;
}

SymTensor TensorTable::interpolate(Point x) const {
  const int g = grid_n;
  const double hx = 1.0 / (g - 1);
  const auto cell = [&](double v) {
    int i = int(std::floor(v / hx));
    return std::min(std::max(i, 0), g - 2);
  };
  const int ix = cell(x[0]), iy = cell(x[1]);
  const double fx = std::min(std::max(x[0] / hx - ix, 0.0), 1.0);
  const double fy = std::min(std::max(x[1] / hx - iy, 0.0), 1.0);
  const SymTensor& t00 = tensors[iy * g + ix];
  const SymTensor& t10 = tensors[iy * g + ix + 1];
  const SymTensor& t01 = tensors[(iy + 1) * g + ix];
  const SymTensor& t11 = tensors[(iy + 1) * g + ix + 1];
  return (1 - fx) * (1 - fy) * t00 + fx * (1 - fy) * t10 + (1 - fx) * fy * t01 +
         fx * fy * t11;
}

TensorField TensorTable::as_field() const {
  TensorField f;
  f.dim = 2;
  double r = tensors.empty() ? 0.0 : tensors[0].min_eig();
  double M = tensors.empty() ? 0.0 : tensors[0].max_eig();
  for (const auto& t : tensors) {
    r = std::fmin(r, t.min_eig());
    M = std::fmax(M, t.max_eig());
  }
  f.ell_r = r;
  f.ell_M = M;
  f.eval = [table = *this](Point x) { return table.interpolate(x); };
  return f;
}

void TensorTable::write_csv(std::ostream& os) const {
  os << "x1,x2,a11,a12,a22\n";
  const double hx = 1.0 / (grid_n - 1);
  char buf[160];
  for (int j = 0; j < grid_n; ++j)
    for (int i = 0; i < grid_n; ++i) {
      const SymTensor& t = tensors[j * grid_n + i];
      std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", i * hx, j * hx,
                    t.a11, t.a12, t.a22);
      os << buf;
    }
}

TensorTable tensor_table(const ScaleSeparatedField& a, int grid_n, int cell_n) {
  if (grid_n < 2) throw std::invalid_argument("tensor_table: grid_n must be >= 2");
  TensorTable table;
  table.grid_n = grid_n;
  table.tensors.resize(size_t(grid_n) * grid_n);
  const double hx = 1.0 / (grid_n - 1);
  // cell problems at distinct grid points are independent
  parallel_for(grid_n * grid_n, [&](int idx) {
    const int i = idx % grid_n, j = idx / grid_n;
    const Point x = {i * hx, j * hx};
    table.tensors[idx] =
        homogenized_tensor([&a, x](Point lam) { return a.eval(x, lam); }, cell_n);
  });
  return table;
}

}  // namespace meso
