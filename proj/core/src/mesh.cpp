#include "maeig/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include "maeig/errors.hpp"

namespace maeig {
namespace {

double signed_area(const Point& a, const Point& b, const Point& c) {
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

// Uniform in [-0.5, 0.5) from the raw generator output, so the stream is
// identical across standard libraries.
double centered_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
}

Point sdf_gradient(const DomainSpec& domain, Point p, double step) {
  const double dx = signed_distance(domain, {p.x + step, p.y}) -
                    signed_distance(domain, {p.x - step, p.y});
  const double dy = signed_distance(domain, {p.x, p.y + step}) -
                    signed_distance(domain, {p.x, p.y - step});
  return {dx / (2.0 * step), dy / (2.0 * step)};
}

// One gradient-descent step toward the zero level set.
Point project_step(const DomainSpec& domain, Point p, double d, double step) {
  const Point g = sdf_gradient(domain, p, step);
  const double g2 = g.x * g.x + g.y * g.y;
  if (g2 <= 0.0) return p;
  return {p.x - d * g.x / g2, p.y - d * g.y / g2};
}

std::vector<Triangle> interior_triangles(const DomainSpec& domain, std::span<const Point> pts,
                                         double geps) {
  std::vector<Triangle> tris = delaunay_triangulate(pts);
  std::erase_if(tris, [&](const Triangle& t) {
    const Point c{(pts[t[0]].x + pts[t[1]].x + pts[t[2]].x) / 3.0,
                  (pts[t[0]].y + pts[t[1]].y + pts[t[2]].y) / 3.0};
    return signed_distance(domain, c) > -geps;
  });
  return tris;
}

std::int64_t edge_key(int a, int b, std::size_t n) {
  if (a > b) std::swap(a, b);
  return static_cast<std::int64_t>(a) * static_cast<std::int64_t>(n) + b;
}

}  // namespace

std::size_t TriMesh::num_interior() const {
  return static_cast<std::size_t>(std::count(boundary_mask.begin(), boundary_mask.end(), 0));
}

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

double TriMesh::total_area() const {
  double sum = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) sum += triangle_area(t);
  return sum;
}

std::vector<double> patch_areas(const TriMesh& mesh) {
  std::vector<double> areas(mesh.num_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double a = std::abs(mesh.triangle_area(t));
    for (int v : mesh.triangles[t]) areas[v] += a;
  }
  return areas;
}

double discrete_norm(std::span<const double> field, std::span<const double> areas, double p) {
  if (field.size() != areas.size()) {
    throw std::invalid_argument("discrete_norm: field and areas differ in length");
  }
  if (!(p >= 1.0)) throw std::invalid_argument("discrete_norm: p must be >= 1");
  double sum = 0.0;
  if (p == 2.0) {
    for (std::size_t v = 0; v < field.size(); ++v) sum += areas[v] * field[v] * field[v];
    return std::sqrt(sum / 3.0);
  }
  if (p == 3.0) {
    for (std::size_t v = 0; v < field.size(); ++v) {
      const double a = std::abs(field[v]);
      sum += areas[v] * a * a * a;
    }
    return std::cbrt(sum / 3.0);
  }
  for (std::size_t v = 0; v < field.size(); ++v) sum += areas[v] * std::pow(std::abs(field[v]), p);
  return std::pow(sum / 3.0, 1.0 / p);
}

TriMesh make_mesh(std::vector<Point> vertices, std::vector<Triangle> triangles, double h_target) {
  TriMesh mesh;
  mesh.vertices = std::move(vertices);
  mesh.triangles = std::move(triangles);
  mesh.h_target = h_target;
  const std::size_t n = mesh.vertices.size();

  for (auto& t : mesh.triangles) {
    if (signed_area(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]) < 0.0) {
      std::swap(t[1], t[2]);
    }
  }

  std::unordered_map<std::int64_t, int> edge_count;
  edge_count.reserve(3 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) ++edge_count[edge_key(t[e], t[(e + 1) % 3], n)];
  }
  mesh.boundary_mask.assign(n, 0);
  for (const auto& [key, count] : edge_count) {
    if (count > 2) throw DegenerateMesh("non-conforming triangulation: edge shared by >2 triangles");
    if (count == 1) {
      mesh.boundary_mask[static_cast<std::size_t>(key / static_cast<std::int64_t>(n))] = 1;
      mesh.boundary_mask[static_cast<std::size_t>(key % static_cast<std::int64_t>(n))] = 1;
    }
  }
  mesh.patch_areas = patch_areas(mesh);
  return mesh;
}

TriMesh generate_mesh(const DomainSpec& domain, double h, std::uint64_t seed,
                      const MeshOptions& options) {
  if (!(h >= 1e-3 && h <= 0.5)) {
    throw std::invalid_argument("generate_mesh: h must lie in [1e-3, 0.5], got " + std::to_string(h));
  }
  const double geps = 1e-3 * h;
  const double fd_step = 1e-6 * domain.diameter();
  const BoundingBox& box = domain.bounding_box;
  std::mt19937_64 rng(seed);

  std::vector<Point> pts(domain.fixed_points.begin(), domain.fixed_points.end());
  const std::size_t n_fixed = pts.size();

  // Equilateral lattice, rows offset by h/2.
  const double dy = h * std::sqrt(3.0) / 2.0;
  for (int row = 0;; ++row) {
    const double y = box.ymin + row * dy;
    if (y > box.ymax + 1e-12) break;
    const double x0 = box.xmin + ((row % 2) ? 0.5 * h : 0.0);
    for (int col = 0;; ++col) {
      const double x = x0 + col * h;
      if (x > box.xmax + 1e-12) break;
      Point p{x + options.jitter * h * centered_uniform(rng),
              y + options.jitter * h * centered_uniform(rng)};
      if (signed_distance(domain, p) >= geps) continue;
      const bool near_fixed = std::any_of(pts.begin(), pts.begin() + n_fixed, [&](const Point& f) {
        return std::hypot(f.x - p.x, f.y - p.y) < 0.5 * h;
      });
      if (!near_fixed) pts.push_back(p);
    }
  }

  const std::size_t n = pts.size();
  std::vector<Point> last(n, Point{1e300, 1e300});
  std::vector<std::array<int, 2>> bars;
  std::vector<Point> force(n);
  bool converged = false;

  for (int step = 0; step < options.max_steps; ++step) {
    double moved = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      moved = std::max(moved, std::hypot(pts[i].x - last[i].x, pts[i].y - last[i].y));
    }
    if (moved > options.retriangulate_tol * h) {
      last = pts;
      TriMesh topo;
      topo.triangles = interior_triangles(domain, pts, geps);
      topo.vertices = pts;
      bars = mesh_edges(topo);
    }

    double sum_l2 = 0.0;
    std::vector<double> lengths(bars.size());
    for (std::size_t b = 0; b < bars.size(); ++b) {
      const Point& p = pts[bars[b][0]];
      const Point& q = pts[bars[b][1]];
      lengths[b] = std::hypot(p.x - q.x, p.y - q.y);
      sum_l2 += lengths[b] * lengths[b];
    }
    const double l0 = options.force_scale * std::sqrt(sum_l2 / static_cast<double>(bars.size()));

    std::fill(force.begin(), force.end(), Point{});
    for (std::size_t b = 0; b < bars.size(); ++b) {
      const double f = std::max(l0 - lengths[b], 0.0);
      if (f == 0.0 || lengths[b] == 0.0) continue;
      const auto [i, j] = bars[b];
      const double fx = f * (pts[i].x - pts[j].x) / lengths[b];
      const double fy = f * (pts[i].y - pts[j].y) / lengths[b];
      force[i].x += fx;
      force[i].y += fy;
      force[j].x -= fx;
      force[j].y -= fy;
    }
    for (std::size_t i = 0; i < n_fixed; ++i) force[i] = {};

    double max_interior_move = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pts[i].x += options.time_step * force[i].x;
      pts[i].y += options.time_step * force[i].y;
      const double d = signed_distance(domain, pts[i]);
      if (d > 0.0) {
        pts[i] = project_step(domain, pts[i], d, fd_step);
      } else if (d < -geps) {
        max_interior_move =
            std::max(max_interior_move, options.time_step * std::hypot(force[i].x, force[i].y));
      }
    }
    if (max_interior_move / h < options.move_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw NonConvergence("mesh relaxation did not settle within " +
                         std::to_string(options.max_steps) + " steps");
  }

  // Final retriangulation; drop unused points and renumber.
  std::vector<Triangle> tris = interior_triangles(domain, pts, geps);
  std::vector<int> remap(n, -1);
  std::vector<Point> used;
  used.reserve(n);
  for (std::size_t i = 0; i < n_fixed; ++i) {
    remap[i] = static_cast<int>(used.size());
    used.push_back(pts[i]);
  }
  for (const auto& t : tris) {
    for (int v : t) {
      if (remap[v] < 0) {
        remap[v] = static_cast<int>(used.size());
        used.push_back(pts[v]);
      }
    }
  }
  for (auto& t : tris) {
    for (int& v : t) v = remap[v];
  }

  TriMesh mesh = make_mesh(std::move(used), std::move(tris), h);

  // Snap boundary vertices onto the zero level set.
  for (std::size_t v = n_fixed; v < mesh.num_vertices(); ++v) {
    if (!mesh.is_boundary(v)) continue;
    Point p = mesh.vertices[v];
    for (int it = 0; it < 50; ++it) {
      const double d = signed_distance(domain, p);
      if (std::abs(d) <= 1e-15) break;
      p = project_step(domain, p, d, fd_step);
    }
    mesh.vertices[v] = p;
  }
  mesh.patch_areas = patch_areas(mesh);

  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!(mesh.triangle_area(t) >= 1e-14)) {
      throw DegenerateMesh("triangle " + std::to_string(t) + " has area " +
                           std::to_string(mesh.triangle_area(t)));
    }
  }
  return mesh;
}

std::vector<std::array<int, 2>> mesh_edges(const TriMesh& mesh) {
  std::vector<std::array<int, 2>> edges;
  edges.reserve(3 * mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      if (a > b) std::swap(a, b);
      edges.push_back({a, b});
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

MeshQuality mesh_quality(const TriMesh& mesh) {
  MeshQuality q{180.0, 0.0, 0.0, 1e300};
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    std::array<double, 3> len{};
    for (int e = 0; e < 3; ++e) {
      const Point& a = mesh.vertices[tri[(e + 1) % 3]];
      const Point& b = mesh.vertices[tri[(e + 2) % 3]];
      len[e] = std::hypot(a.x - b.x, a.y - b.y);  // opposite vertex e
    }
    for (int e = 0; e < 3; ++e) {
      const double a = len[e], b = len[(e + 1) % 3], c = len[(e + 2) % 3];
      const double cosv = std::clamp((b * b + c * c - a * a) / (2.0 * b * c), -1.0, 1.0);
      const double deg = std::acos(cosv) * 180.0 / std::numbers::pi;
      q.min_angle_deg = std::min(q.min_angle_deg, deg);
      q.max_angle_deg = std::max(q.max_angle_deg, deg);
    }
    q.min_area = std::min(q.min_area, mesh.triangle_area(t));
  }
  std::vector<double> lengths;
  for (const auto& [a, b] : mesh_edges(mesh)) {
    lengths.push_back(std::hypot(mesh.vertices[a].x - mesh.vertices[b].x,
                                 mesh.vertices[a].y - mesh.vertices[b].y));
  }
  if (!lengths.empty()) {
    auto mid = lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2);
    std::nth_element(lengths.begin(), mid, lengths.end());
    q.median_edge = *mid;
  }
  return q;
}

}  // namespace maeig
