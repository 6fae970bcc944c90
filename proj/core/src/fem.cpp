#include "maeig/fem.hpp"

#include <bit>
#include <chrono>
#include <stdexcept>
#include <string>

#include "maeig/errors.hpp"

namespace maeig {
namespace {

// Gradients of the three barycentric basis functions of a ccw triangle.
std::array<Gradient, 3> basis_gradients(const Point& a, const Point& b, const Point& c,
                                        double& area) {
  const double det = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  area = 0.5 * det;
  const double inv = 1.0 / det;
  return {{{(b.y - c.y) * inv, (c.x - b.x) * inv},
           {(c.y - a.y) * inv, (a.x - c.x) * inv},
           {(a.y - b.y) * inv, (b.x - a.x) * inv}}};
}

}  // namespace

std::uint64_t mesh_fingerprint(const TriMesh& mesh) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](std::uint64_t x) {
    for (int i = 0; i < 8; ++i) {
      h ^= (x >> (8 * i)) & 0xffu;
      h *= 1099511628211ull;
    }
  };
  for (const auto& p : mesh.vertices) {
    mix(std::bit_cast<std::uint64_t>(p.x));
    mix(std::bit_cast<std::uint64_t>(p.y));
  }
  for (const auto& t : mesh.triangles) {
    for (int v : t) mix(static_cast<std::uint64_t>(v));
  }
  return h;
}

PoissonSystem assemble_system(const TriMesh& mesh) {
  PoissonSystem sys;
  const std::size_t n = mesh.num_vertices();
  sys.interior_of_vertex_.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    if (!mesh.is_boundary(v)) {
      sys.interior_of_vertex_[v] = static_cast<int>(sys.vertex_of_interior_.size());
      sys.vertex_of_interior_.push_back(static_cast<int>(v));
    }
  }
  const auto m = static_cast<Eigen::Index>(sys.vertex_of_interior_.size());
  if (m == 0) throw DegenerateMesh("assemble_system: mesh has no interior vertex");

  std::vector<Eigen::Triplet<double>> inner, rows;
  inner.reserve(9 * mesh.num_triangles());
  rows.reserve(9 * mesh.num_triangles());
  for (const auto& tri : mesh.triangles) {
    double area = 0.0;
    const auto grads =
        basis_gradients(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]], area);
    for (int i = 0; i < 3; ++i) {
      const int ri = sys.interior_of_vertex_[tri[i]];
      if (ri < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const double k = area * (grads[i].x * grads[j].x + grads[i].y * grads[j].y);
        rows.emplace_back(ri, tri[j], k);
        const int cj = sys.interior_of_vertex_[tri[j]];
        if (cj >= 0) inner.emplace_back(ri, cj, k);
      }
    }
  }
  sys.stiffness_.resize(m, m);
  sys.stiffness_.setFromTriplets(inner.begin(), inner.end());
  sys.coupling_.resize(m, static_cast<Eigen::Index>(n));
  sys.coupling_.setFromTriplets(rows.begin(), rows.end());

  sys.lumped_mass_.resize(n);
  for (std::size_t v = 0; v < n; ++v) sys.lumped_mass_[v] = mesh.patch_areas[v] / 3.0;

  const auto t0 = std::chrono::steady_clock::now();
  auto factor = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>();
  factor->compute(sys.stiffness_);
  if (factor->info() != Eigen::Success) {
    throw SingularSystem("stiffness factorization failed (degenerate mesh?)");
  }
  if ((factor->vectorD().array() <= 0.0).any()) {
    throw SingularSystem("stiffness matrix is not positive definite");
  }
  sys.factor_ = std::move(factor);
  sys.factor_ms_ =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  sys.fingerprint_ = mesh_fingerprint(mesh);
  return sys;
}

Eigen::VectorXd PoissonSystem::solve_interior(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = factor_->solve(rhs);
  if (factor_->info() != Eigen::Success) throw SingularSystem("stiffness solve failed");
  return x;
}

std::vector<double> solve_poisson(const PoissonSystem& system, std::span<const double> source) {
  if (source.size() != system.num_vertices()) {
    throw std::invalid_argument("solve_poisson: source has " + std::to_string(source.size()) +
                                " entries, mesh has " + std::to_string(system.num_vertices()));
  }
  const auto interior = system.interior_vertices();
  const auto mass = system.lumped_mass();
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(interior.size()));
  for (std::size_t i = 0; i < interior.size(); ++i) {
    // K u = -M f for Delta u = f.
    rhs[static_cast<Eigen::Index>(i)] = -mass[interior[i]] * source[interior[i]];
  }
  const Eigen::VectorXd x = system.solve_interior(rhs);
  std::vector<double> u(system.num_vertices(), 0.0);
  for (std::size_t i = 0; i < interior.size(); ++i) u[interior[i]] = x[static_cast<Eigen::Index>(i)];
  return u;
}

std::vector<double> discrete_laplacian(const PoissonSystem& system, std::span<const double> field) {
  if (field.size() != system.num_vertices()) {
    throw std::invalid_argument("discrete_laplacian: field length mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> u(field.data(), static_cast<Eigen::Index>(field.size()));
  const Eigen::VectorXd ku = system.coupling() * u;
  const auto interior = system.interior_vertices();
  const auto mass = system.lumped_mass();
  std::vector<double> lap(system.num_vertices(), 0.0);
  for (std::size_t i = 0; i < interior.size(); ++i) {
    lap[interior[i]] = -ku[static_cast<Eigen::Index>(i)] / mass[interior[i]];
  }
  return lap;
}

std::vector<Gradient> element_gradients(const TriMesh& mesh, std::span<const double> field) {
  if (field.size() != mesh.num_vertices()) {
    throw std::invalid_argument("element_gradients: field length mismatch");
  }
  std::vector<Gradient> out(mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    double area = 0.0;
    const auto g =
        basis_gradients(mesh.vertices[tri[0]], mesh.vertices[tri[1]], mesh.vertices[tri[2]], area);
    // differences against vertex 0 (basis gradients sum to zero) avoid
    // cancellation of the field's mean value
    const double d1 = field[tri[1]] - field[tri[0]];
    const double d2 = field[tri[2]] - field[tri[0]];
    out[t] = {d1 * g[1].x + d2 * g[2].x, d1 * g[1].y + d2 * g[2].y};
  }
  return out;
}

}  // namespace maeig
