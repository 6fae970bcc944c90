#include "maeig/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace maeig {
namespace {

double adaptive_simpson(auto&& f, double a, double b, double fa, double fm, double fb,
                        double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

// 4 * int_0^1 (1 - x^3)^(1/3) dx, integrated to ~1e-12 relative.
double smoothed_square_area() {
  static const double area = [] {
    auto f = [](double x) { return std::cbrt(std::max(0.0, 1.0 - x * x * x)); };
    const double fa = f(0.0), fm = f(0.5), fb = f(1.0);
    const double whole = (fa + 4.0 * fm + fb) / 6.0;
    return 4.0 * adaptive_simpson(f, 0.0, 1.0, fa, fm, fb, whole, 1e-13, 60);
  }();
  return area;
}

}  // namespace

DomainSpec DomainSpec::make(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitDisk:
      return {kind, {-1.0, 1.0, -1.0, 1.0}, {}, std::numbers::pi};
    case DomainKind::Ellipse: {
      const double b = 1.0 / std::numbers::sqrt2;
      return {kind, {-1.0, 1.0, -b, b}, {}, std::numbers::pi / std::numbers::sqrt2};
    }
    case DomainKind::SmoothedSquare:
      return {kind, {-1.0, 1.0, -1.0, 1.0}, {}, smoothed_square_area()};
    case DomainKind::UnitSquare:
      return {kind,
              {0.0, 1.0, 0.0, 1.0},
              {{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}},
              1.0};
  }
  throw std::invalid_argument("unknown domain kind");
}

double DomainSpec::diameter() const {
  switch (kind) {
    case DomainKind::UnitDisk:
    case DomainKind::Ellipse:
      return 2.0;
    case DomainKind::SmoothedSquare:
      // Farthest points lie on the diagonal: 2 * 2^(1/3) / sqrt(2).
      return 2.0 * std::sqrt(2.0) * std::cbrt(0.5);
    case DomainKind::UnitSquare:
      return std::numbers::sqrt2;
  }
  return 0.0;
}

double signed_distance(const DomainSpec& domain, Point p) {
  switch (domain.kind) {
    case DomainKind::UnitDisk:
      return std::hypot(p.x, p.y) - 1.0;
    case DomainKind::Ellipse:
      return std::sqrt(p.x * p.x + 2.0 * p.y * p.y) - 1.0;
    case DomainKind::SmoothedSquare: {
      const double ax = std::abs(p.x), ay = std::abs(p.y);
      return std::cbrt(ax * ax * ax + ay * ay * ay) - 1.0;
    }
    case DomainKind::UnitSquare: {
      const double qx = std::abs(p.x - 0.5) - 0.5;
      const double qy = std::abs(p.y - 0.5) - 0.5;
      const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
      return outside + std::min(std::max(qx, qy), 0.0);
    }
  }
  return 0.0;
}

double reference_area(const DomainSpec& domain) { return domain.area; }

Point boundary_point(const DomainSpec& domain, double t) {
  const double theta = 2.0 * std::numbers::pi * t;
  const double c = std::cos(theta), s = std::sin(theta);
  switch (domain.kind) {
    case DomainKind::UnitDisk:
      return {c, s};
    case DomainKind::Ellipse:
      return {c, s / std::numbers::sqrt2};
    case DomainKind::SmoothedSquare:
      // |x|^3 = c^2, |y|^3 = s^2.
      return {std::copysign(std::cbrt(c * c), c), std::copysign(std::cbrt(s * s), s)};
    case DomainKind::UnitSquare: {
      double u = 4.0 * (t - std::floor(t));
      const int side = std::min(static_cast<int>(u), 3);
      u -= side;
      switch (side) {
        case 0: return {u, 0.0};
        case 1: return {1.0, u};
        case 2: return {1.0 - u, 1.0};
        default: return {0.0, 1.0 - u};
      }
    }
  }
  return {};
}

std::optional<DomainKind> parse_domain(std::string_view token) {
  if (token == "disk") return DomainKind::UnitDisk;
  if (token == "ellipse") return DomainKind::Ellipse;
  if (token == "smoothsq") return DomainKind::SmoothedSquare;
  if (token == "square") return DomainKind::UnitSquare;
  return std::nullopt;
}

std::string_view domain_token(DomainKind kind) {
  switch (kind) {
    case DomainKind::UnitDisk: return "disk";
    case DomainKind::Ellipse: return "ellipse";
    case DomainKind::SmoothedSquare: return "smoothsq";
    case DomainKind::UnitSquare: return "square";
  }
  return "?";
}

}  // namespace maeig
