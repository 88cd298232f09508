#include "meso/fem.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace meso {

namespace {

// gradients of the P1 basis on element e; area/length returned separately
void element_gradients(const Mesh& mesh, int e, Point grads[3]) {
  const auto& el = mesh.elements[e];
  if (mesh.dim == 1) {
    const double h = mesh.nodes[el[1]][0] - mesh.nodes[el[0]][0];
    grads[0] = {-1.0 / h, 0.0};
    grads[1] = {1.0 / h, 0.0};
    return;
  }
  const Point p0 = mesh.nodes[el[0]], p1 = mesh.nodes[el[1]], p2 = mesh.nodes[el[2]];
  const double det = (p1[0] - p0[0]) * (p2[1] - p0[1]) - (p2[0] - p0[0]) * (p1[1] - p0[1]);
  grads[0] = {(p1[1] - p2[1]) / det, (p2[0] - p1[0]) / det};
  grads[1] = {(p2[1] - p0[1]) / det, (p0[0] - p2[0]) / det};
  grads[2] = {(p0[1] - p1[1]) / det, (p1[0] - p0[0]) / det};
}

SymTensor coefficient_at(const TensorField& A, Point c, int dim) {
  const SymTensor t = A.eval(c);
  if (!(t.min_eig() > 0.0)) {
    std::ostringstream os;
    os << "assemble: coefficient not elliptic at quadrature point (" << c[0];
    if (dim == 2) os << ", " << c[1];
    os << "), min eigenvalue " << t.min_eig();
    throw std::runtime_error(os.str());
  }
  return t;
}

std::vector<std::vector<int>> adjacency(const Mesh& mesh, const std::vector<int>& index,
                                        int nrows) {
  std::vector<std::vector<int>> rows(nrows);
  for (auto& r : rows) r.reserve(8);
  const int k = mesh.nodes_per_element();
  for (const auto& el : mesh.elements)
    for (int a = 0; a < k; ++a) {
      const int ia = index[el[a]];
      if (ia < 0) continue;
      for (int b = 0; b < k; ++b) {
        const int ib = index[el[b]];
        if (ib >= 0) rows[ia].push_back(ib);
      }
    }
  return rows;
}

// 2-point Gauss (1D) / edge-midpoint (2D) quadrature over one element,
// exact for quadratics; fn receives the quadrature point
template <typename Fn>
double quad_element(const Mesh& mesh, int e, Fn&& fn) {
  const auto& el = mesh.elements[e];
  if (mesh.dim == 1) {
    const double x0 = mesh.nodes[el[0]][0], x1 = mesh.nodes[el[1]][0];
    const double c = (x0 + x1) / 2.0, r = (x1 - x0) / (2.0 * std::sqrt(3.0));
    return (x1 - x0) / 2.0 * (fn(Point{c - r, 0.0}) + fn(Point{c + r, 0.0}));
  }
  const Point p0 = mesh.nodes[el[0]], p1 = mesh.nodes[el[1]], p2 = mesh.nodes[el[2]];
  const double w = mesh.element_measure() / 3.0;
  return w * (fn(0.5 * (p0 + p1)) + fn(0.5 * (p1 + p2)) + fn(0.5 * (p2 + p0)));
}

const Mesh& finer_of(const NodalField& u, const NodalField& v) {
  if (u.mesh->dim != v.mesh->dim)
    throw std::invalid_argument("field comparison: dimension mismatch");
  const int nu = u.mesh->n, nv = v.mesh->n;
  const int nf = std::max(nu, nv), nc = std::min(nu, nv);
  if (nf % nc != 0)
    throw std::invalid_argument("field comparison: meshes are not nested");
  return nu >= nv ? *u.mesh : *v.mesh;
}

}  // namespace

double NodalField::value_at(Point x) const {
  const Mesh& m = *mesh;
  const int e = m.locate(x);
  const auto& el = m.elements[e];
  if (m.dim == 1) {
    const double x0 = m.nodes[el[0]][0], x1 = m.nodes[el[1]][0];
    const double t = (x[0] - x0) / (x1 - x0);
    return (1.0 - t) * values[el[0]] + t * values[el[1]];
  }
  Point g[3];
  element_gradients(m, e, g);
  const Point p0 = m.nodes[el[0]];
  double out = values[el[0]];
  // P1: u(x) = u(p0) + sum_a u_a grad(phi_a) . (x - p0), using phi_0 = 1 - phi_1 - phi_2
  for (int a = 1; a < 3; ++a) {
    const double lam = g[a][0] * (x[0] - p0[0]) + g[a][1] * (x[1] - p0[1]);
    out += lam * (values[el[a]] - values[el[0]]);
  }
  return out;
}

Point NodalField::grad_at(Point x) const {
  const Mesh& m = *mesh;
  const int e = m.locate(x);
  const auto& el = m.elements[e];
  Point g[3], out = {0.0, 0.0};
  element_gradients(m, e, g);
  for (int a = 0; a < m.nodes_per_element(); ++a) out = out + values[el[a]] * g[a];
  return out;
}

SparseSystem assemble(const MeshPtr& mesh, const TensorField& A,
                      const std::function<double(Point)>& f) {
  const Mesh& m = *mesh;
  if (A.dim != m.dim) throw std::invalid_argument("assemble: coefficient dimension mismatch");
  SparseSystem sys;
  sys.mesh = mesh;
  const int nn = int(m.nodes.size());
  sys.full_to_red.assign(nn, -1);
  for (int i = 0; i < nn; ++i)
    if (!m.boundary[i]) {
      sys.full_to_red[i] = int(sys.red_to_full.size());
      sys.red_to_full.push_back(i);
    }
  const int nred = int(sys.red_to_full.size());

  auto rows = adjacency(m, sys.full_to_red, nred);
  sys.K = CsrMatrix::from_pattern(rows);
  sys.F.assign(nred, 0.0);

  const int k = m.nodes_per_element();
  const double meas = m.element_measure();
  Point g[3];
  for (int e = 0; e < int(m.elements.size()); ++e) {
    const auto& el = m.elements[e];
    const Point c = m.element_centroid(e);
    const SymTensor a = coefficient_at(A, c, m.dim);
    element_gradients(m, e, g);
    const double fc = f(c) * meas / k;
    for (int ai = 0; ai < k; ++ai) {
      const int ra = sys.full_to_red[el[ai]];
      if (ra < 0) continue;
      sys.F[ra] += fc;
      const Point ag = a.apply(g[ai]);
      for (int bi = 0; bi < k; ++bi) {
        const int rb = sys.full_to_red[el[bi]];
        if (rb < 0) continue;
        sys.K.at(ra, rb) += meas * (ag[0] * g[bi][0] + ag[1] * g[bi][1]);
      }
    }
  }
  return sys;
}

CsrMatrix assemble_unconstrained(const MeshPtr& mesh, const TensorField& A) {
  const Mesh& m = *mesh;
  const int nn = int(m.nodes.size());
  std::vector<int> identity(nn);
  for (int i = 0; i < nn; ++i) identity[i] = i;
  auto rows = adjacency(m, identity, nn);
  CsrMatrix K = CsrMatrix::from_pattern(rows);
  const int k = m.nodes_per_element();
  const double meas = m.element_measure();
  Point g[3];
  for (int e = 0; e < int(m.elements.size()); ++e) {
    const auto& el = m.elements[e];
    const SymTensor a = coefficient_at(A, m.element_centroid(e), m.dim);
    element_gradients(m, e, g);
    for (int ai = 0; ai < k; ++ai) {
      const Point ag = a.apply(g[ai]);
      for (int bi = 0; bi < k; ++bi)
        K.at(el[ai], el[bi]) += meas * (ag[0] * g[bi][0] + ag[1] * g[bi][1]);
    }
  }
  return K;
}

NodalField solve(const SparseSystem& sys, double rel_tol, SolveStats* stats) {
  std::vector<double> u_red;
  if (sys.mesh->dim == 1) {
    u_red = tridiag_solve(sys.K, sys.F);
    if (stats) {
      auto r = sys.K.multiply(u_red);
      double rn = 0.0, bn = 0.0;
      for (size_t i = 0; i < r.size(); ++i) {
        rn += (r[i] - sys.F[i]) * (r[i] - sys.F[i]);
        bn += sys.F[i] * sys.F[i];
      }
      *stats = {0, bn > 0 ? std::sqrt(rn / bn) : 0.0};
    }
  } else {
    u_red = pcg_solve(sys.K, sys.F, rel_tol, stats);
  }
  NodalField u;
  u.mesh = sys.mesh;
  u.values.assign(sys.mesh->nodes.size(), 0.0);
  for (size_t i = 0; i < u_red.size(); ++i) u.values[sys.red_to_full[i]] = u_red[i];
  return u;
}

double l2_error(const NodalField& u, const NodalField& v) {
  const Mesh& fine = finer_of(u, v);
  double acc = 0.0;
  for (int e = 0; e < int(fine.elements.size()); ++e)
    acc += quad_element(fine, e, [&](Point x) {
      const double d = u.value_at(x) - v.value_at(x);
      return d * d;
    });
  return std::sqrt(acc);
}

double l2_error(const NodalField& u, const std::function<double(Point)>& v) {
  const Mesh& m = *u.mesh;
  double acc = 0.0;
  for (int e = 0; e < int(m.elements.size()); ++e)
    acc += quad_element(m, e, [&](Point x) {
      const double d = u.value_at(x) - v(x);
      return d * d;
    });
  return std::sqrt(acc);
}

double h1_semi_error(const NodalField& u, const NodalField& v) {
  const Mesh& fine = finer_of(u, v);
  const double meas = fine.element_measure();
  double acc = 0.0;
  for (int e = 0; e < int(fine.elements.size()); ++e) {
    const Point c = fine.element_centroid(e);
    const Point d = u.grad_at(c) - v.grad_at(c);
    acc += meas * (d[0] * d[0] + d[1] * d[1]);
  }
  return std::sqrt(acc);
}

double h1_semi_error(const NodalField& u, const std::function<Point(Point)>& grad_v) {
  const Mesh& m = *u.mesh;
  const double meas = m.element_measure();
  double acc = 0.0;
  for (int e = 0; e < int(m.elements.size()); ++e) {
    const Point c = m.element_centroid(e);
    const Point d = u.grad_at(c) - grad_v(c);
    acc += meas * (d[0] * d[0] + d[1] * d[1]);
  }
  return std::sqrt(acc);
}

double l2_norm(const NodalField& u) {
  return l2_error(u, [](Point) { return 0.0; });
}

double h1_semi_norm(const NodalField& u) {
  return h1_semi_error(u, [](Point) { return Point{0.0, 0.0}; });
}

ElementField flux(const NodalField& u, const TensorField& A) {
  const Mesh& m = *u.mesh;
  ElementField out;
  out.mesh = u.mesh;
  out.values.resize(m.elements.size());
  for (int e = 0; e < int(m.elements.size()); ++e) {
    const Point c = m.element_centroid(e);
    out.values[e] = A.eval(c).apply(u.grad_at(c));
  }
  return out;
}

double flux_component_error(const ElementField& a, const ElementField& b, int comp) {
  const Mesh& m = *b.mesh;
  const double meas = m.element_measure();
  double acc = 0.0;
  for (int e = 0; e < int(m.elements.size()); ++e) {
    const Point c = m.element_centroid(e);
    const double d = a.value_at(c)[comp] - b.values[e][comp];
    acc += meas * d * d;
  }
  return std::sqrt(acc);
}

double flux_component_norm(const ElementField& a, int comp) {
  const Mesh& m = *a.mesh;
  const double meas = m.element_measure();
  double acc = 0.0;
  for (const Point& v : a.values) acc += meas * v[comp] * v[comp];
  return std::sqrt(acc);
}

void write_csv(const NodalField& u, std::ostream& os) {
  const Mesh& m = *u.mesh;
  char buf[128];
  if (m.dim == 1) {
    os << "x1,value\n";
    for (size_t i = 0; i < m.nodes.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", m.nodes[i][0], u.values[i]);
      os << buf;
    }
    return;
  }
  os << "x1,x2,value\n";
  for (size_t i = 0; i < m.nodes.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", m.nodes[i][0], m.nodes[i][1],
                  u.values[i]);
    os << buf;
  }
}

void write_csv(const ElementField& f, std::ostream& os) {
  const Mesh& m = *f.mesh;
  char buf[160];
  if (m.dim == 1) {
    os << "x1,v1\n";
    for (size_t e = 0; e < f.values.size(); ++e) {
      std::snprintf(buf, sizeof buf, "%.12g,%.12g\n", m.element_centroid(int(e))[0],
                    f.values[e][0]);
      os << buf;
    }
    return;
  }
  os << "x1,x2,v1,v2\n";
  for (size_t e = 0; e < f.values.size(); ++e) {
    const Point c = m.element_centroid(int(e));
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g\n", c[0], c[1], f.values[e][0],
                  f.values[e][1]);
    os << buf;
  }
}

}  // namespace meso
