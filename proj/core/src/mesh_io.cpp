#include "maeig/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace maeig {

namespace {
constexpr const char* kHeader = "# maeig-mesh 1";
}

void write_mesh(std::ostream& out, const TriMesh& mesh) {
  out << kHeader << '\n' << mesh.num_vertices() << ' ' << mesh.num_triangles() << '\n';
  char buf[96];
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    std::snprintf(buf, sizeof buf, "%zu %.17g %.17g %d\n", v, mesh.vertices[v].x,
                  mesh.vertices[v].y, mesh.is_boundary(v) ? 1 : 0);
    out << buf;
  }
  for (const auto& t : mesh.triangles) out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
}

void write_mesh(const std::string& path, const TriMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_mesh(out, mesh);
}

TriMesh read_mesh(std::istream& in) {
  std::string header;
  std::getline(in, header);
  if (header != kHeader) throw std::runtime_error("not a maeig mesh file");
  std::size_t nv = 0, nt = 0;
  in >> nv >> nt;
  std::vector<Point> vertices(nv);
  std::vector<std::uint8_t> flags(nv);
  for (std::size_t i = 0; i < nv; ++i) {
    std::size_t idx;
    int b;
    in >> idx >> vertices[i].x >> vertices[i].y >> b;
    if (idx != i) throw std::runtime_error("mesh file: vertex indices out of order");
    flags[i] = static_cast<std::uint8_t>(b != 0);
  }
  std::vector<Triangle> triangles(nt);
  for (auto& t : triangles) in >> t[0] >> t[1] >> t[2];
  if (!in) throw std::runtime_error("mesh file truncated");
  TriMesh mesh = make_mesh(std::move(vertices), std::move(triangles));
  mesh.boundary_mask = std::move(flags);
  return mesh;
}

TriMesh read_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_mesh(in);
}

}  // namespace maeig
