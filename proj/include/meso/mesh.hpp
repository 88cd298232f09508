#ifndef MESO_MESH_HPP
#define MESO_MESH_HPP

#include <array>
#include <cstdint>
#include <memory>
#include <vector>

#include "meso/tensor.hpp"

namespace meso {

// Uniform simplicial mesh of [0,1]^d. 1D: n intervals. 2D: n x n squares,
// each split into two right triangles by the (lower-left -> upper-right)
// diagonal, so refining n -> k*n nests elements exactly.
struct Mesh {
  int dim = 1;
  int n = 0;  // cells per side
  std::vector<Point> nodes;
  std::vector<std::array<int, 3>> elements;  // [2] == -1 in 1D
  std::vector<std::uint8_t> boundary;        // 1 on the Dirichlet boundary
  double h = 0.0;                            // max element diameter

  int nodes_per_element() const { return dim + 1; }
  int node_id(int ix, int iy) const { return dim == 1 ? ix : iy * (n + 1) + ix; }

  double element_measure() const;          // length or area, uniform
  Point element_centroid(int e) const;
  // index of the element containing x (points on shared faces get the
  // element on the lower-left side; x may sit on the domain boundary)
  int locate(Point x) const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

MeshPtr build_mesh(int dim, int n);

}  // namespace meso

#endif
