#ifndef MESO_FEM_HPP
#define MESO_FEM_HPP

#include <functional>

#include "meso/field.hpp"
#include "meso/mesh.hpp"
#include "meso/sparse.hpp"

namespace meso {

// Stiffness system for -div(A grad u) = f with homogeneous Dirichlet data,
// P1 elements, one-point (centroid) coefficient quadrature, Dirichlet
// rows/columns eliminated.
struct SparseSystem {
  MeshPtr mesh;
  CsrMatrix K;                   // reduced, symmetric positive definite
  std::vector<double> F;         // reduced load
  std::vector<int> red_to_full;  // reduced index -> node id
  std::vector<int> full_to_red;  // node id -> reduced index or -1
};

struct NodalField {
  MeshPtr mesh;
  std::vector<double> values;  // one per node, zero on Dirichlet nodes

  double value_at(Point x) const;
  Point grad_at(Point x) const;  // piecewise constant per element
};

// Per-element constant vector field (e.g. the flux A grad u).
struct ElementField {
  MeshPtr mesh;
  std::vector<Point> values;

  Point value_at(Point x) const { return values[mesh->locate(x)]; }
};

SparseSystem assemble(const MeshPtr& mesh, const TensorField& A,
                      const std::function<double(Point)>& f);

// Stiffness matrix over all nodes, no boundary conditions (row sums vanish).
CsrMatrix assemble_unconstrained(const MeshPtr& mesh, const TensorField& A);

// Tridiagonal direct solve in 1D, Jacobi-PCG in 2D; relative residual
// <= rel_tol, deterministic for fixed inputs.
NodalField solve(const SparseSystem& system, double rel_tol = 1e-10,
                 SolveStats* stats = nullptr);

// Element-quadrature norms of differences. Cross-mesh comparison requires
// nested meshes (the finer n divisible by the coarser); quadrature runs on
// the finer mesh and is exact for differences of P1 fields.
double l2_error(const NodalField& u, const NodalField& v);
double l2_error(const NodalField& u, const std::function<double(Point)>& v);
double h1_semi_error(const NodalField& u, const NodalField& v);
double h1_semi_error(const NodalField& u, const std::function<Point(Point)>& grad_v);
double l2_norm(const NodalField& u);
double h1_semi_norm(const NodalField& u);

ElementField flux(const NodalField& u, const TensorField& A);

// CSV exports: nodal values as x1[,x2],value; flux at element centroids
void write_csv(const NodalField& u, std::ostream& os);
void write_csv(const ElementField& f, std::ostream& os);

// L2 norm of (component comp of a - component comp of b), integrated over
// b's elements; pass comp = 0 for e1.
double flux_component_error(const ElementField& a, const ElementField& b, int comp);
double flux_component_norm(const ElementField& a, int comp);

}  // namespace meso

#endif
