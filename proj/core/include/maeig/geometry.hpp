#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace maeig {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

enum class DomainKind { UnitDisk, Ellipse, SmoothedSquare, UnitSquare };

struct BoundingBox {
  double xmin, xmax, ymin, ymax;
};

/// One of the four convex test domains.
///
///   UnitDisk        x^2 + y^2 < 1
///   Ellipse         x^2 + 2 y^2 < 1
///   SmoothedSquare  |x|^3 + |y|^3 < 1
///   UnitSquare      (0,1) x (0,1)
///
/// `fixed_points` are vertices pinned verbatim by the mesher (the square's
/// corners). `area` is |Omega|.
struct DomainSpec {
  DomainKind kind;
  BoundingBox bounding_box;
  std::vector<Point> fixed_points;
  double area;

  static DomainSpec make(DomainKind kind);

  double diameter() const;
};

/// Negative inside, positive outside, zero on the boundary. Exact distance
/// for the disk and the square; level-set normalisations
/// sqrt(x^2+2y^2)-1 and (|x|^3+|y|^3)^(1/3)-1 for the ellipse and the
/// smoothed square.
double signed_distance(const DomainSpec& domain, Point p);

/// |Omega|. The smoothed-square area is obtained once by adaptive quadrature.
double reference_area(const DomainSpec& domain);

/// Maps t in [0, 1) onto a point of the zero level set (closed curve,
/// counterclockwise).
Point boundary_point(const DomainSpec& domain, double t);

/// CLI tokens: disk | ellipse | smoothsq | square.
std::optional<DomainKind> parse_domain(std::string_view token);
std::string_view domain_token(DomainKind kind);

}  // namespace maeig
