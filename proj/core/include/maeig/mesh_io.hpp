#pragma once

#include <iosfwd>
#include <string>

#include "maeig/mesh.hpp"

namespace maeig {

// Plain-text mesh format:
//
//   # maeig-mesh 1
//   <num_vertices> <num_triangles>
//   <index> <x> <y> <boundary 0|1>        (num_vertices lines)
//   <v0> <v1> <v2>                         (num_triangles lines, ccw)
//
// Coordinates are written with 17 significant digits so a read-back mesh is
// bit-identical.
void write_mesh(std::ostream& out, const TriMesh& mesh);
void write_mesh(const std::string& path, const TriMesh& mesh);

TriMesh read_mesh(std::istream& in);
TriMesh read_mesh(const std::string& path);

}  // namespace maeig
