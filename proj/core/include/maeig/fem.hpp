#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include "maeig/mesh.hpp"

namespace maeig {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct Gradient {
  double x = 0.0;
  double y = 0.0;
};

/// P1 stiffness on a fixed mesh with a cached sparse Cholesky factorization
/// of the interior block (zero Dirichlet data).
///
/// `stiffness` is the interior block; `coupling` holds the interior rows over
/// all vertices, so `coupling * u` is K u restricted to interior rows even
/// when u is nonzero on the boundary.
class PoissonSystem {
 public:
  std::span<const int> interior_index() const { return interior_of_vertex_; }
  std::span<const int> interior_vertices() const { return vertex_of_interior_; }
  const SparseMatrix& stiffness() const { return stiffness_; }
  const SparseMatrix& coupling() const { return coupling_; }
  /// Lumped mass |omega_v| / 3 per vertex.
  std::span<const double> lumped_mass() const { return lumped_mass_; }
  std::size_t num_vertices() const { return interior_of_vertex_.size(); }
  std::size_t num_unknowns() const { return vertex_of_interior_.size(); }
  std::uint64_t mesh_fingerprint() const { return fingerprint_; }
  long nonzeros() const { return stiffness_.nonZeros(); }
  double factor_ms() const { return factor_ms_; }

  /// Solves K x = rhs on the interior unknowns with the cached factor.
  Eigen::VectorXd solve_interior(const Eigen::VectorXd& rhs) const;

 private:
  friend PoissonSystem assemble_system(const TriMesh& mesh);

  std::vector<int> interior_of_vertex_;  // -1 on the boundary
  std::vector<int> vertex_of_interior_;
  SparseMatrix stiffness_;
  SparseMatrix coupling_;
  std::vector<double> lumped_mass_;
  std::shared_ptr<const Eigen::SimplicialLDLT<SparseMatrix>> factor_;
  std::uint64_t fingerprint_ = 0;
  double factor_ms_ = 0.0;
};

/// Assembles and factorizes. Throws SingularSystem when the factorization
/// fails, DegenerateMesh when there is no interior vertex.
PoissonSystem assemble_system(const TriMesh& mesh);

/// Hash of vertex coordinates and connectivity.
std::uint64_t mesh_fingerprint(const TriMesh& mesh);

/// Solves Delta u = source with u = 0 on the boundary. The load is mass
/// lumped: b_v = |omega_v| / 3 * source_v. Boundary entries of the result are
/// exactly 0.0.
std::vector<double> solve_poisson(const PoissonSystem& system, std::span<const double> source);

/// Nodal discrete Laplacian -(K u)_v / (|omega_v| / 3) at interior vertices,
/// 0 at boundary vertices. Inverse of solve_poisson on the interior.
std::vector<double> discrete_laplacian(const PoissonSystem& system, std::span<const double> field);

/// Exact gradient of the P1 interpolant on every triangle.
std::vector<Gradient> element_gradients(const TriMesh& mesh, std::span<const double> field);

}  // namespace maeig
