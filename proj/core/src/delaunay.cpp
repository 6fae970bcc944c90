#include "maeig/delaunay.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace maeig {
namespace {

double orient(const Point& a, const Point& b, const Point& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

// > 0 when d lies strictly inside the circumcircle of the ccw triangle abc.
bool in_circle(const Point& a, const Point& b, const Point& c, const Point& d) {
  const long double adx = a.x - d.x, ady = a.y - d.y;
  const long double bdx = b.x - d.x, bdy = b.y - d.y;
  const long double cdx = c.x - d.x, cdy = c.y - d.y;
  const long double ad = adx * adx + ady * ady;
  const long double bd = bdx * bdx + bdy * bdy;
  const long double cd = cdx * cdx + cdy * cdy;
  const long double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                          ad * (bdx * cdy - bdy * cdx);
  return det > 0.0L;
}

struct CavityEdge {
  int a, b, outer;
};

// Vertex slot kGhost is the vertex at infinity: a triangle (a, b, ghost) in
// ccw order stands for the open half-plane left of a -> b, outside the hull.
constexpr int kGhost = -2;

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
  bool alive = true;

  int ghost_slot() const {
    for (int k = 0; k < 3; ++k) {
      if (v[k] == kGhost) return k;
    }
    return -1;
  }
};

class Triangulator {
 public:
  explicit Triangulator(std::span<const Point> input) : pts_(input.begin(), input.end()) {
    double xmin = pts_[0].x, xmax = xmin, ymin = pts_[0].y, ymax = ymin;
    for (const auto& p : pts_) {
      xmin = std::min(xmin, p.x);
      xmax = std::max(xmax, p.x);
      ymin = std::min(ymin, p.y);
      ymax = std::max(ymax, p.y);
    }
    bin_span_ = std::max({xmax - xmin, ymax - ymin, 1e-300});
    bin_x0_ = xmin;
    bin_y0_ = ymin;
  }

  std::vector<Triangle> run() {
    const std::vector<int> order = insertion_order();
    const std::size_t seeded = seed(order);
    if (seeded == 0) return {};
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (i < seeded && used_seed(order[i])) continue;
      insert(order[i]);
    }
    std::vector<Triangle> out;
    out.reserve(tris_.size());
    for (const auto& t : tris_) {
      if (!t.alive || t.ghost_slot() >= 0) continue;
      out.push_back({t.v[0], t.v[1], t.v[2]});
    }
    return out;
  }

 private:
  // First non-degenerate triangle along the insertion order. Returns the
  // number of order entries consumed (0 if all points are collinear).
  std::size_t seed(const std::vector<int>& order) {
    const int a = order[0];
    std::size_t i = 1;
    while (i < order.size() && pts_[order[i]] == pts_[a]) ++i;
    if (i == order.size()) return 0;
    const int b = order[i];
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      const int c = order[j];
      const double o = orient(pts_[a], pts_[b], pts_[c]);
      if (o == 0.0) continue;
      const std::array<int, 3> tri = o > 0 ? std::array<int, 3>{a, b, c} : std::array<int, 3>{a, c, b};
      seed_ = {a, b, c};
      tris_.push_back(Tri{tri, {-1, -1, -1}, true});
      for (int e = 0; e < 3; ++e) {
        // hull edge u -> v of the real triangle; its ghost sees it as v -> u
        const int u = tri[(e + 1) % 3], v = tri[(e + 2) % 3];
        tris_.push_back(Tri{{v, u, kGhost}, {-1, -1, -1}, true});
      }
      link_all();
      mark_.assign(tris_.size(), 0);
      return j + 1;
    }
    return 0;
  }

  bool used_seed(int idx) const { return idx == seed_[0] || idx == seed_[1] || idx == seed_[2]; }

  // Neighbor links for the seed configuration by brute force.
  void link_all() {
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      for (int e = 0; e < 3; ++e) {
        const int a = tris_[t].v[(e + 1) % 3], b = tris_[t].v[(e + 2) % 3];
        for (std::size_t o = 0; o < tris_.size(); ++o) {
          if (o == t) continue;
          for (int f = 0; f < 3; ++f) {
            if (tris_[o].v[(f + 1) % 3] == b && tris_[o].v[(f + 2) % 3] == a) {
              tris_[t].nb[e] = static_cast<int>(o);
            }
          }
        }
      }
    }
  }

  // Hilbert-curve order keeps successive insertions close (short walks in
  // locate) and avoids long flat insertion fronts, which inflate cavities on
  // lattice-like inputs.
  std::vector<int> insertion_order() const {
    constexpr std::uint32_t side = 1u << 16;
    const int n = static_cast<int>(pts_.size());
    std::vector<std::uint64_t> key(n);
    for (int i = 0; i < n; ++i) {
      const double fx = (pts_[i].x - bin_x0_) / bin_span_;
      const double fy = (pts_[i].y - bin_y0_) / bin_span_;
      const auto x = static_cast<std::uint32_t>(std::clamp(fx, 0.0, 1.0) * (side - 1));
      const auto y = static_cast<std::uint32_t>(std::clamp(fy, 0.0, 1.0) * (side - 1));
      key[i] = hilbert_index(x, y, side);
    }
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return key[a] < key[b]; });
    return order;
  }

  static std::uint64_t hilbert_index(std::uint32_t x, std::uint32_t y, std::uint32_t side) {
    std::uint64_t d = 0;
    for (std::uint32_t s = side / 2; s > 0; s /= 2) {
      const std::uint32_t rx = (x & s) ? 1u : 0u;
      const std::uint32_t ry = (y & s) ? 1u : 0u;
      d += static_cast<std::uint64_t>(s) * s * ((3u * rx) ^ ry);
      if (ry == 0) {
        if (rx == 1) {
          x = side - 1 - x;
          y = side - 1 - y;
        }
        std::swap(x, y);
      }
    }
    return d;
  }

  int locate(const Point& p) {
    int t = last_;
    if (t < 0 || !tris_[t].alive) {
      t = static_cast<int>(tris_.size()) - 1;
      while (!tris_[t].alive) --t;
    }
    for (std::size_t steps = 0; steps < 4 * tris_.size() + 16; ++steps) {
      const Tri& tri = tris_[t];
      const int g = tri.ghost_slot();
      if (g >= 0) {
        if (bad(t, p)) return t;
        t = tri.nb[g];  // step back into the hull
        continue;
      }
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        const Point& a = pts_[tri.v[(e + 1) % 3]];
        const Point& b = pts_[tri.v[(e + 2) % 3]];
        if (orient(a, b, p) < 0.0) {
          next = tri.nb[e];
          break;
        }
      }
      if (next < 0) return t;
      t = next;
    }
    // Walk cycled on a degenerate configuration; fall back to a scan.
    for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
      if (!tris_[i].alive) continue;
      const Tri& tri = tris_[i];
      if (tri.ghost_slot() >= 0) {
        if (bad(i, p)) return i;
        continue;
      }
      if (orient(pts_[tri.v[0]], pts_[tri.v[1]], p) >= 0.0 &&
          orient(pts_[tri.v[1]], pts_[tri.v[2]], p) >= 0.0 &&
          orient(pts_[tri.v[2]], pts_[tri.v[0]], p) >= 0.0) {
        return i;
      }
    }
    throw std::runtime_error("delaunay: point location failed");
  }

  bool bad(int t, const Point& p) const {
    const Tri& tri = tris_[t];
    const int g = tri.ghost_slot();
    if (g < 0) return in_circle(pts_[tri.v[0]], pts_[tri.v[1]], pts_[tri.v[2]], p);
    const Point& a = pts_[tri.v[(g + 1) % 3]];
    const Point& b = pts_[tri.v[(g + 2) % 3]];
    const double o = orient(a, b, p);
    if (o != 0.0) return o > 0.0;
    // on the hull line: inside the circle only strictly between a and b
    const double t_ab = (p.x - a.x) * (b.x - a.x) + (p.y - a.y) * (b.y - a.y);
    const double len2 = (b.x - a.x) * (b.x - a.x) + (b.y - a.y) * (b.y - a.y);
    return t_ab > 0.0 && t_ab < len2;
  }

  void insert(int idx) {
    const Point& p = pts_[idx];
    const int start = locate(p);
    {
      const Tri& tri = tris_[start];
      for (int k = 0; k < 3; ++k) {
        if (tri.v[k] != kGhost && pts_[tri.v[k]] == p) return;  // duplicate
      }
    }

    // Cavity: connected set of triangles whose circumcircle holds p.
    cavity_.clear();
    stack_.clear();
    stack_.push_back(start);
    mark_[start] = stamp_ + 1;
    while (!stack_.empty()) {
      const int t = stack_.back();
      stack_.pop_back();
      cavity_.push_back(t);
      for (int e = 0; e < 3; ++e) {
        const int nb = tris_[t].nb[e];
        if (nb < 0 || mark(nb) == stamp_ + 1) continue;
        if (bad(nb, p)) {
          mark_[nb] = stamp_ + 1;
          stack_.push_back(nb);
        }
      }
    }
    ++stamp_;

    // Boundary edges of the cavity, each oriented ccw as seen from inside.
    edges_.clear();
    for (int t : cavity_) {
      for (int e = 0; e < 3; ++e) {
        const int nb = tris_[t].nb[e];
        if (nb >= 0 && mark(nb) == stamp_) continue;
        edges_.push_back({tris_[t].v[(e + 1) % 3], tris_[t].v[(e + 2) % 3], nb});
      }
    }
    for (int t : cavity_) {
      tris_[t].alive = false;
      free_.push_back(t);
    }

    // Fan from p; link new triangles to the outside and to each other.
    auto& created = created_;
    created.clear();
    for (const auto& edge : edges_) {
      int slot;
      if (!free_.empty()) {
        slot = free_.back();
        free_.pop_back();
        tris_[slot] = Tri{{idx, edge.a, edge.b}, {edge.outer, -1, -1}, true};
      } else {
        slot = static_cast<int>(tris_.size());
        tris_.push_back(Tri{{idx, edge.a, edge.b}, {edge.outer, -1, -1}, true});
        mark_.push_back(0);
      }
      created.push_back(slot);
      if (edge.outer >= 0) {
        Tri& o = tris_[edge.outer];
        for (int e = 0; e < 3; ++e) {
          const int a = o.v[(e + 1) % 3], b = o.v[(e + 2) % 3];
          if (a == edge.b && b == edge.a) o.nb[e] = slot;
        }
      }
    }
    // new triangle (p, a, b): nb[1] is across (b, p), nb[2] across (p, a).
    for (int s : created) {
      const int a = tris_[s].v[1];
      const int b = tris_[s].v[2];
      for (int o : created) {
        if (o == s) continue;
        if (tris_[o].v[1] == b) tris_[s].nb[1] = o;
        if (tris_[o].v[2] == a) tris_[s].nb[2] = o;
      }
    }
    last_ = created.empty() ? -1 : created.front();
    if (mark_.size() < tris_.size()) mark_.resize(tris_.size(), 0);
  }

  int mark(int t) const { return t < static_cast<int>(mark_.size()) ? mark_[t] : 0; }

  std::vector<Point> pts_;
  std::vector<Tri> tris_;
  std::vector<int> free_;
  std::vector<int> mark_ = std::vector<int>(1, 0);
  std::vector<int> cavity_, stack_, created_;
  std::vector<CavityEdge> edges_;
  int stamp_ = 0;
  std::array<int, 3> seed_{-1, -1, -1};
  int last_ = -1;
  double bin_span_ = 1.0, bin_x0_ = 0.0, bin_y0_ = 0.0;
};

}  // namespace

std::vector<Triangle> delaunay_triangulate(std::span<const Point> points) {
  if (points.size() < 3) return {};
  return Triangulator(points).run();
}

}  // namespace maeig
