#include "meso/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace meso {

double Mesh::element_measure() const {
  const double hc = 1.0 / n;
  return dim == 1 ? hc : hc * hc / 2.0;
}

Point Mesh::element_centroid(int e) const {
  const auto& el = elements[e];
  if (dim == 1) return {(nodes[el[0]][0] + nodes[el[1]][0]) / 2.0, 0.0};
  Point c = {0.0, 0.0};
  for (int a = 0; a < 3; ++a) c = c + nodes[el[a]];
  return (1.0 / 3.0) * c;
}

int Mesh::locate(Point x) const {
  const auto clamp_cell = [this](double v) {
    int i = int(std::floor(v * n));
    return std::min(std::max(i, 0), n - 1);
  };
  const int ix = clamp_cell(x[0]);
  if (dim == 1) return ix;
  const int iy = clamp_cell(x[1]);
  const double fx = x[0] * n - ix, fy = x[1] * n - iy;
  const int sq = iy * n + ix;
  return 2 * sq + (fx >= fy ? 0 : 1);
}

MeshPtr build_mesh(int dim, int n) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("build_mesh: dim must be 1 or 2");
  if (n < 2) throw std::invalid_argument("build_mesh: n must be >= 2");
  auto mesh = std::make_shared<Mesh>();
  mesh->dim = dim;
  mesh->n = n;
  const double hc = 1.0 / n;
  if (dim == 1) {
    mesh->h = hc;
    mesh->nodes.resize(n + 1);
    mesh->boundary.assign(n + 1, 0);
    for (int i = 0; i <= n; ++i) mesh->nodes[i] = {i * hc, 0.0};
    mesh->boundary[0] = mesh->boundary[n] = 1;
    mesh->elements.resize(n);
    for (int i = 0; i < n; ++i) mesh->elements[i] = {i, i + 1, -1};
  } else {
    mesh->h = hc * std::sqrt(2.0);
    const int nn = (n + 1) * (n + 1);
    mesh->nodes.resize(nn);
    mesh->boundary.assign(nn, 0);
    for (int iy = 0; iy <= n; ++iy)
      for (int ix = 0; ix <= n; ++ix) {
        const int id = iy * (n + 1) + ix;
        mesh->nodes[id] = {ix * hc, iy * hc};
        if (ix == 0 || ix == n || iy == 0 || iy == n) mesh->boundary[id] = 1;
      }
    mesh->elements.resize(2 * n * n);
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix) {
        const int v00 = iy * (n + 1) + ix;
        const int v10 = v00 + 1;
        const int v01 = v00 + (n + 1);
        const int v11 = v01 + 1;
        const int sq = iy * n + ix;
        mesh->elements[2 * sq] = {v00, v10, v11};      // lower: fx >= fy
        mesh->elements[2 * sq + 1] = {v00, v11, v01};  // upper
      }
  }
  return mesh;
}

}  // namespace meso
