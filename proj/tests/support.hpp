#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "maeig/mesh.hpp"

namespace maeig::test {

// n x n cells on [x0, x0+len]^2, each cell split along the same diagonal.
inline TriMesh structured_square(int n, double x0 = 0.0, double len = 1.0) {
  std::vector<Point> pts;
  std::vector<Triangle> tris;
  const double d = len / n;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) pts.push_back({x0 + i * d, x0 + j * d});
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      tris.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      tris.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return make_mesh(std::move(pts), std::move(tris), d);
}

// Equilateral lattice clipped to rings around `center`: vertex 0 is the
// center, `rings` layers of hexagons around it.
inline TriMesh hex_patch(Point center, double edge, int rings) {
  std::vector<Point> pts;
  std::vector<std::array<int, 2>> coords;
  const double s3 = std::sqrt(3.0);
  for (int q = -rings; q <= rings; ++q) {
    for (int r = -rings; r <= rings; ++r) {
      const int s = -q - r;
      if (std::abs(s) > rings) continue;
      coords.push_back({q, r});
    }
  }
  // centre first
  std::stable_partition(coords.begin(), coords.end(),
                        [](const std::array<int, 2>& c) { return c[0] == 0 && c[1] == 0; });
  for (auto [q, r] : coords) {
    pts.push_back({center.x + edge * (q + 0.5 * r), center.y + edge * (s3 / 2.0) * r});
  }
  auto find = [&](int q, int r) -> int {
    for (std::size_t i = 0; i < coords.size(); ++i) {
      if (coords[i][0] == q && coords[i][1] == r) return static_cast<int>(i);
    }
    return -1;
  };
  std::vector<Triangle> tris;
  for (auto [q, r] : coords) {
    const int a = find(q, r);
    const int b = find(q + 1, r);
    const int c = find(q, r + 1);
    const int d = find(q + 1, r - 1);
    if (b >= 0 && c >= 0) tris.push_back({a, b, c});
    if (b >= 0 && d >= 0) tris.push_back({a, d, b});
  }
  return make_mesh(std::move(pts), std::move(tris), edge);
}

inline std::vector<double> sample(const TriMesh& mesh, const std::function<double(double, double)>& f) {
  std::vector<double> out(mesh.num_vertices());
  for (std::size_t v = 0; v < out.size(); ++v) out[v] = f(mesh.vertices[v].x, mesh.vertices[v].y);
  return out;
}

}  // namespace maeig::test
