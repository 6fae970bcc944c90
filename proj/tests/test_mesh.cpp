#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "maeig/errors.hpp"
#include "maeig/mesh.hpp"
#include "maeig/mesh_io.hpp"
#include "support.hpp"

using namespace maeig;

namespace {

const DomainKind kAll[] = {DomainKind::UnitDisk, DomainKind::Ellipse, DomainKind::SmoothedSquare,
                           DomainKind::UnitSquare};

double signed_area(const TriMesh& m, const Triangle& t) {
  const Point a = m.vertices[t[0]], b = m.vertices[t[1]], c = m.vertices[t[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
}

void check_invariants(const TriMesh& mesh, const DomainSpec& dom) {
  const double diam = dom.diameter();
  for (const auto& t : mesh.triangles) REQUIRE(signed_area(mesh, t) >= 1e-14);

  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const int a = t[e], b = t[(e + 1) % 3];
      ++edge_count[{std::min(a, b), std::max(a, b)}];
    }
  }
  std::vector<char> on_boundary_edge(mesh.num_vertices(), 0);
  for (const auto& [edge, count] : edge_count) {
    REQUIRE((count == 1 || count == 2));
    if (count == 1) on_boundary_edge[edge.first] = on_boundary_edge[edge.second] = 1;
  }
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const double sd = signed_distance(dom, mesh.vertices[v]);
    CHECK(static_cast<bool>(on_boundary_edge[v]) == mesh.is_boundary(v));
    if (mesh.is_boundary(v)) {
      CHECK(std::abs(sd) <= 1e-8 * diam);
    } else {
      CHECK(sd < -1e-8 * diam);
    }
  }
  double patch_sum = 0.0;
  for (double a : mesh.patch_areas) patch_sum += a;
  CHECK(patch_sum == doctest::Approx(3.0 * mesh.total_area()).epsilon(1e-12));
}

}  // namespace

TEST_CASE("generated meshes satisfy the structural invariants") {
  for (DomainKind kind : kAll) {
    for (double h : {1.0 / 20.0, 1.0 / 40.0}) {
      const auto dom = DomainSpec::make(kind);
      const TriMesh mesh = generate_mesh(dom, h, 0);
      CAPTURE(domain_token(kind));
      CAPTURE(h);
      check_invariants(mesh, dom);
      const MeshQuality q = mesh_quality(mesh);
      CHECK(q.min_angle_deg >= 20.0);
      CHECK(std::abs(q.median_edge / h - 1.0) <= 0.15);
      CHECK(mesh.total_area() == doctest::Approx(dom.area).epsilon(5e-3));
    }
  }
}

TEST_CASE("square mesh pins its corners") {
  const auto dom = DomainSpec::make(DomainKind::UnitSquare);
  const TriMesh mesh = generate_mesh(dom, 0.5, 0);
  for (const Point& c : dom.fixed_points) {
    CHECK(std::find(mesh.vertices.begin(), mesh.vertices.end(), c) != mesh.vertices.end());
  }
}

TEST_CASE("disk vertex count follows the equilateral density estimate") {
  const double h = 1.0 / 20.0;
  const TriMesh mesh = generate_mesh(DomainSpec::make(DomainKind::UnitDisk), h, 0);
  // one vertex per 2 equilateral triangles of area sqrt(3)/4 h^2
  const double estimate = std::numbers::pi / (std::sqrt(3.0) / 2.0 * h * h);
  CHECK(estimate == doctest::Approx(1451.0).epsilon(1e-3));
  CHECK(std::abs(static_cast<double>(mesh.num_vertices()) / estimate - 1.0) <= 0.2);
}

TEST_CASE("meshing is deterministic per seed") {
  const auto dom = DomainSpec::make(DomainKind::UnitDisk);
  const TriMesh a = generate_mesh(dom, 1.0 / 20.0, 0);
  const TriMesh b = generate_mesh(dom, 1.0 / 20.0, 0);
  CHECK(a.vertices == b.vertices);
  CHECK(a.triangles == b.triangles);
  const TriMesh c = generate_mesh(dom, 1.0 / 20.0, 1);
  CHECK_FALSE(a.vertices == c.vertices);
}

TEST_CASE("mesh size outside the sane range is rejected") {
  const auto dom = DomainSpec::make(DomainKind::UnitDisk);
  CHECK_THROWS_AS(generate_mesh(dom, 0.6, 0), std::invalid_argument);
  CHECK_THROWS_AS(generate_mesh(dom, 1e-4, 0), std::invalid_argument);
}

TEST_CASE("relaxation cap raises NonConvergence") {
  MeshOptions opts;
  opts.max_steps = 2;
  CHECK_THROWS_AS(generate_mesh(DomainSpec::make(DomainKind::UnitDisk), 0.1, 0, opts), NonConvergence);
}

TEST_CASE("patch areas") {
  SUBCASE("single right triangle") {
    const TriMesh m = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}});
    for (double a : m.patch_areas) CHECK(a == doctest::Approx(0.5));
    for (std::size_t v = 0; v < 3; ++v) CHECK(m.is_boundary(v));
  }
  SUBCASE("two triangles sharing an edge") {
    // areas 0.5 and 1.0
    const TriMesh m = make_mesh({{0, 0}, {1, 0}, {0, 1}, {2, 1}}, {{{0, 1, 2}}, {{1, 3, 2}}});
    const double a = m.triangle_area(0), b = m.triangle_area(1);
    CHECK(a == doctest::Approx(0.5));
    CHECK(b == doctest::Approx(1.0));
    CHECK(m.patch_areas[1] == doctest::Approx(a + b));
    CHECK(m.patch_areas[2] == doctest::Approx(a + b));
    CHECK(m.patch_areas[0] == doctest::Approx(a));
    CHECK(m.patch_areas[3] == doctest::Approx(b));
  }
  SUBCASE("clockwise input is reoriented") {
    const TriMesh m = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{{0, 2, 1}}});
    CHECK(m.triangle_area(0) == doctest::Approx(0.5));
  }
}

TEST_CASE("non-manifold connectivity is rejected") {
  std::vector<Point> pts{{0, 0}, {1, 0}, {0.5, 1}, {0.5, -1}, {0.5, 0.5}};
  std::vector<Triangle> tris{{{0, 1, 2}}, {{0, 3, 1}}, {{0, 1, 4}}};
  CHECK_THROWS_AS(make_mesh(pts, tris), DegenerateMesh);
}

TEST_CASE("discrete norm") {
  const TriMesh tri = make_mesh({{0, 0}, {1, 0}, {0, 1}}, {{{0, 1, 2}}});
  const std::vector<double> ones(3, 1.0);
  CHECK(discrete_norm(std::vector<double>(3, 0.0), tri.patch_areas, 2) == 0.0);
  CHECK(discrete_norm(ones, tri.patch_areas, 3) == doctest::Approx(std::cbrt(0.5)).epsilon(1e-15));

  const TriMesh mesh = generate_mesh(DomainSpec::make(DomainKind::UnitDisk), 0.1, 0);
  const std::vector<double> c1(mesh.num_vertices(), 1.0);
  CHECK(discrete_norm(c1, mesh.patch_areas, 2) ==
        doctest::Approx(std::sqrt(mesh.total_area())).epsilon(1e-13));

  std::mt19937_64 rng(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> f(mesh.num_vertices()), q(mesh.num_vertices()), sum(mesh.num_vertices()),
        scaled(mesh.num_vertices());
    const double c = 5.0 * g(rng);
    for (std::size_t v = 0; v < f.size(); ++v) {
      f[v] = g(rng);
      q[v] = g(rng);
      sum[v] = f[v] + q[v];
      scaled[v] = c * f[v];
    }
    for (double p : {1.0, 2.0, 3.0}) {
      const double nf = discrete_norm(f, mesh.patch_areas, p);
      CHECK(discrete_norm(scaled, mesh.patch_areas, p) ==
            doctest::Approx(std::abs(c) * nf).epsilon(1e-13));
      CHECK(discrete_norm(sum, mesh.patch_areas, p) <=
            nf + discrete_norm(q, mesh.patch_areas, p) + 1e-14);
    }
  }

  CHECK_THROWS_AS(discrete_norm(ones, std::vector<double>(2, 1.0), 2), std::invalid_argument);
  CHECK_THROWS_AS(discrete_norm(ones, tri.patch_areas, 0.5), std::invalid_argument);
}

TEST_CASE("discrete L2 norm converges on the square") {
  using std::numbers::pi;
  const TriMesh mesh = generate_mesh(DomainSpec::make(DomainKind::UnitSquare), 1.0 / 40.0, 0);
  const auto f = test::sample(mesh, [](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); });
  CHECK(std::abs(discrete_norm(f, mesh.patch_areas, 2) - 0.5) < 1e-2);
}

TEST_CASE("mesh text format round-trips") {
  const TriMesh mesh = generate_mesh(DomainSpec::make(DomainKind::Ellipse), 0.1, 0);
  std::stringstream buf;
  write_mesh(buf, mesh);
  CHECK(buf.str().rfind("# maeig-mesh 1", 0) == 0);
  const TriMesh back = read_mesh(buf);
  CHECK(back.vertices == mesh.vertices);
  CHECK(back.triangles == mesh.triangles);
  CHECK(back.boundary_mask == mesh.boundary_mask);

  std::stringstream bad("not a mesh\n");
  CHECK_THROWS(read_mesh(bad));
}
