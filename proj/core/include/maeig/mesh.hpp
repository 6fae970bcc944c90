#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maeig/delaunay.hpp"
#include "maeig/geometry.hpp"

namespace maeig {

/// Conforming triangulation with counterclockwise triangles.
///
/// `patch_areas[v]` is |omega_v|, the area of the union of triangles that
/// share vertex v. Every triangle is counted once per vertex, so the patch
/// areas sum to three times the mesh area.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<Triangle> triangles;
  std::vector<std::uint8_t> boundary_mask;
  double h_target = 0.0;
  std::vector<double> patch_areas;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }
  bool is_boundary(std::size_t v) const { return boundary_mask[v] != 0; }
  std::size_t num_interior() const;

  double triangle_area(std::size_t t) const;
  double total_area() const;
};

struct MeshOptions {
  int max_steps = 2000;
  // Retriangulate once any point has moved this many h since the last time.
  double retriangulate_tol = 0.1;
  // Stop when the largest interior step falls below this many h.
  double move_tol = 1e-3;
  double force_scale = 1.2;
  double time_step = 0.2;
  // Initial lattice jitter in units of h, drawn from the seeded generator.
  double jitter = 1e-2;
};

/// Force-relaxation mesher in the DistMesh style (uniform size function).
/// Deterministic for fixed (domain, h, seed). Throws NonConvergence if the
/// relaxation does not settle within `max_steps`, DegenerateMesh if the final
/// triangulation has a sliver or is not conforming.
TriMesh generate_mesh(const DomainSpec& domain, double h, std::uint64_t seed,
                      const MeshOptions& options = {});

/// Builds a mesh from explicit data: orients triangles ccw, marks vertices on
/// edges used by exactly one triangle as boundary, fills patch areas.
TriMesh make_mesh(std::vector<Point> vertices, std::vector<Triangle> triangles, double h_target = 0.0);

/// |omega_v| for every vertex.
std::vector<double> patch_areas(const TriMesh& mesh);

/// ((1/3) sum_v |omega_v| |f_v|^p)^(1/p).
double discrete_norm(std::span<const double> field, std::span<const double> areas, double p);

struct MeshQuality {
  double min_angle_deg;
  double max_angle_deg;
  double median_edge;
  double min_area;
};

MeshQuality mesh_quality(const TriMesh& mesh);

/// Sorted unique undirected edges (i < j).
std::vector<std::array<int, 2>> mesh_edges(const TriMesh& mesh);

}  // namespace maeig
