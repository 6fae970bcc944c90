#include "maeig/recovery.hpp"

#include <stdexcept>

namespace maeig {
namespace {

std::vector<Gradient> average_to_vertices(const TriMesh& mesh, std::span<const Gradient> grads) {
  std::vector<Gradient> nodal(mesh.num_vertices());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = mesh.triangle_area(t);
    for (int v : mesh.triangles[t]) {
      nodal[v].x += a * grads[t].x;
      nodal[v].y += a * grads[t].y;
    }
  }
  for (std::size_t v = 0; v < nodal.size(); ++v) {
    nodal[v].x /= mesh.patch_areas[v];
    nodal[v].y /= mesh.patch_areas[v];
  }
  return nodal;
}

}  // namespace

std::vector<Gradient> recover_gradient(const TriMesh& mesh, std::span<const double> field) {
  const auto grads = element_gradients(mesh, field);
  return average_to_vertices(mesh, grads);
}

HessianField recover_hessian(const TriMesh& mesh, std::span<const double> field) {
  const auto g = recover_gradient(mesh, field);
  const std::size_t n = g.size();
  std::vector<double> gx(n), gy(n);
  for (std::size_t v = 0; v < n; ++v) {
    gx[v] = g[v].x;
    gy[v] = g[v].y;
  }
  const auto dgx = recover_gradient(mesh, gx);
  const auto dgy = recover_gradient(mesh, gy);
  HessianField h;
  h.uxx.resize(n);
  h.uxy.resize(n);
  h.uyy.resize(n);
  for (std::size_t v = 0; v < n; ++v) {
    h.uxx[v] = dgx[v].x;
    h.uyy[v] = dgy[v].y;
    h.uxy[v] = 0.5 * (dgx[v].y + dgy[v].x);
  }
  return h;
}

std::vector<double> hessian_determinant(const HessianField& hess) {
  if (hess.uxy.size() != hess.uxx.size() || hess.uyy.size() != hess.uxx.size()) {
    throw std::invalid_argument("hessian_determinant: component lengths differ");
  }
  std::vector<double> det(hess.size());
  for (std::size_t v = 0; v < det.size(); ++v) {
    det[v] = hess.uxx[v] * hess.uyy[v] - hess.uxy[v] * hess.uxy[v];
  }
  return det;
}

HessianField discrete_hessian(const TriMesh& mesh, const PoissonSystem& system,
                              std::span<const double> field) {
  HessianField h = recover_hessian(mesh, field);
  const auto lap = discrete_laplacian(system, field);
  for (std::size_t v = 0; v < h.size(); ++v) {
    if (mesh.is_boundary(v)) {
      h.uxx[v] = h.uxy[v] = h.uyy[v] = 0.0;
      continue;
    }
    const double shift = 0.5 * (lap[v] - (h.uxx[v] + h.uyy[v]));
    h.uxx[v] += shift;
    h.uyy[v] += shift;
  }
  return h;
}

}  // namespace maeig
