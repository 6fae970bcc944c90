#pragma once

#include <array>
#include <span>
#include <vector>

#include "maeig/geometry.hpp"

namespace maeig {

using Triangle = std::array<int, 3>;

// Delaunay triangulation of a planar point set (incremental Bowyer-Watson).
// Triangles are returned counterclockwise and index into `points`. Duplicate
// points are skipped and never referenced.
std::vector<Triangle> delaunay_triangulate(std::span<const Point> points);

}  // namespace maeig
