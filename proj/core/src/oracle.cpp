#include "maeig/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "maeig/errors.hpp"
#include "maeig/fem.hpp"

namespace maeig {
namespace {

constexpr double kSeriesStart = 1e-4;

struct State {
  double v, p;
};

State rhs(double lambda, double r, const State& s) {
  return {s.p, lambda * r * s.v * s.v / s.p};
}

State rk4_step(double lambda, double r, const State& s, double dr) {
  auto blowup = [](const State& x) {
    if (!(x.p > 0.0)) throw BlowUp("radial integration: v' reached zero (lambda out of range)");
  };
  const State k1 = rhs(lambda, r, s);
  const State s2{s.v + 0.5 * dr * k1.v, s.p + 0.5 * dr * k1.p};
  blowup(s2);
  const State k2 = rhs(lambda, r + 0.5 * dr, s2);
  const State s3{s.v + 0.5 * dr * k2.v, s.p + 0.5 * dr * k2.p};
  blowup(s3);
  const State k3 = rhs(lambda, r + 0.5 * dr, s3);
  const State s4{s.v + dr * k3.v, s.p + dr * k3.p};
  blowup(s4);
  const State k4 = rhs(lambda, r + dr, s4);
  State out{s.v + dr / 6.0 * (k1.v + 2.0 * k2.v + 2.0 * k3.v + k4.v),
            s.p + dr / 6.0 * (k1.p + 2.0 * k2.p + 2.0 * k3.p + k4.p)};
  blowup(out);
  return out;
}

State series(double lambda, double v0, double r) {
  const double c = std::sqrt(lambda) * std::abs(v0);
  return {v0 + 0.5 * c * r * r, c * r};
}

double simpson(std::span<const double> f, double dr) {
  const std::size_t n = f.size() - 1;
  if (n < 2) return n == 1 ? 0.5 * dr * (f[0] + f[1]) : 0.0;
  double sum = 0.0;
  std::size_t even_end = (n % 2 == 0) ? n : n - 3;
  for (std::size_t i = 0; i + 2 <= even_end; i += 2) {
    sum += dr / 3.0 * (f[i] + 4.0 * f[i + 1] + f[i + 2]);
  }
  if (even_end != n) {  // Simpson 3/8 on the trailing three intervals
    const std::size_t i = even_end;
    sum += 3.0 * dr / 8.0 * (f[i] + 3.0 * f[i + 1] + 3.0 * f[i + 2] + f[i + 3]);
  }
  return sum;
}

}  // namespace

double RadialSolution::value(double radius) const {
  const std::size_t n = r.size() - 1;
  const double dr = r[1] - r[0];
  const double x = std::clamp(radius, 0.0, r.back());
  const std::size_t i = std::min(static_cast<std::size_t>(x / dr), n - 1);
  const double t = (x - r[i]) / dr;
  const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  const double h10 = t * (1.0 - t) * (1.0 - t);
  const double h01 = t * t * (3.0 - 2.0 * t);
  const double h11 = t * t * (t - 1.0);
  return h00 * v[i] + h10 * dr * dv[i] + h01 * v[i + 1] + h11 * dr * dv[i + 1];
}

double RadialSolution::derivative(double radius) const {
  // Hermite interpolation of p = v' using p' = lambda r v^2 / p.
  const std::size_t n = r.size() - 1;
  const double dr = r[1] - r[0];
  const double x = std::clamp(radius, 0.0, r.back());
  const std::size_t i = std::min(static_cast<std::size_t>(x / dr), n - 1);
  const double t = (x - r[i]) / dr;
  auto dp = [&](std::size_t j) {
    if (r[j] == 0.0) return std::sqrt(lambda) * std::abs(v[0]);
    return lambda * r[j] * v[j] * v[j] / dv[j];
  };
  const double h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
  const double h10 = t * (1.0 - t) * (1.0 - t);
  const double h01 = t * t * (3.0 - 2.0 * t);
  const double h11 = t * t * (t - 1.0);
  return h00 * dv[i] + h10 * dr * dp(i) + h01 * dv[i + 1] + h11 * dr * dp(i + 1);
}

RadialSolution integrate_radial(double lambda, double v0, int n_steps) {
  if (!(lambda > 0.0)) throw std::invalid_argument("integrate_radial: lambda must be positive");
  if (!(v0 < 0.0)) throw std::invalid_argument("integrate_radial: v0 must be negative");
  if (n_steps < 1000) throw std::invalid_argument("integrate_radial: need at least 1000 steps");

  const auto n = static_cast<std::size_t>(n_steps);
  const double dr = 1.0 / n_steps;
  RadialSolution sol;
  sol.lambda = lambda;
  sol.r.resize(n + 1);
  sol.v.resize(n + 1);
  sol.dv.resize(n + 1);
  for (std::size_t i = 0; i <= n; ++i) sol.r[i] = static_cast<double>(i) * dr;

  // Grid nodes inside the series region take the series directly.
  std::size_t i = 0;
  for (; i <= n && sol.r[i] <= kSeriesStart; ++i) {
    const State s = series(lambda, v0, sol.r[i]);
    sol.v[i] = s.v;
    sol.dv[i] = s.p;
  }
  State state = series(lambda, v0, kSeriesStart);
  double r = kSeriesStart;
  for (; i <= n; ++i) {
    state = rk4_step(lambda, r, state, sol.r[i] - r);
    r = sol.r[i];
    sol.v[i] = state.v;
    sol.dv[i] = state.p;
  }
  return sol;
}

double shoot_lambda(double tol, double v0, int n_steps) {
  if (!(tol >= 1e-12)) throw std::invalid_argument("shoot_lambda: tol must be >= 1e-12");
  auto end_value = [&](double lambda) { return integrate_radial(lambda, v0, n_steps).v.back(); };

  double lo = 1.0, hi = 50.0;
  double flo = end_value(lo), fhi = end_value(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    throw NoBracket("shoot_lambda: v(1) does not change sign on [1, 50]");
  }
  // Illinois regula falsi.
  int side = 0;
  double mid = lo;
  for (int it = 0; it < 200; ++it) {
    mid = (lo * fhi - hi * flo) / (fhi - flo);
    const double fmid = end_value(mid);
    if (std::abs(fmid) <= tol) return mid;
    if (fmid < 0.0) {
      lo = mid;
      flo = fmid;
      if (side == -1) fhi *= 0.5;
      side = -1;
    } else {
      hi = mid;
      fhi = fmid;
      if (side == 1) flo *= 0.5;
      side = 1;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  return mid;
}

double radial_mass(const RadialSolution& sol) {
  std::vector<double> f(sol.r.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = sol.v[i] * sol.v[i] * sol.r[i];
  return 2.0 * std::numbers::pi * simpson(f, sol.r[1] - sol.r[0]);
}

RadialSolution normalized_profile(const RadialSolution& sol) {
  const double s = 1.0 / std::sqrt(radial_mass(sol));
  RadialSolution out = sol;
  for (double& x : out.v) x *= s;
  for (double& x : out.dv) x *= s;
  out.scale = sol.scale * s;
  return out;
}

RadialSolution disk_reference(double tol, int n_steps) {
  const double lambda = shoot_lambda(tol, -1.0, n_steps);
  return normalized_profile(integrate_radial(lambda, -1.0, n_steps));
}

ErrorNorms error_norms(const TriMesh& mesh, std::span<const double> u_h, const RadialSolution& sol) {
  if (u_h.size() != mesh.num_vertices()) throw std::invalid_argument("error_norms: length mismatch");
  auto exact = [&](const Point& p) { return sol.value(std::hypot(p.x, p.y)); };

  ErrorNorms e;
  double l2 = 0.0, semi = 0.0, nodal_semi = 0.0;
  std::vector<double> nodal(mesh.num_vertices());
  for (std::size_t v = 0; v < nodal.size(); ++v) nodal[v] = u_h[v] - exact(mesh.vertices[v]);

  const auto grad_h = element_gradients(mesh, u_h);
  const auto grad_e = element_gradients(mesh, nodal);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double area = mesh.triangle_area(t);
    double sq = 0.0;
    for (int k = 0; k < 3; ++k) {
      const int a = tri[(k + 1) % 3], b = tri[(k + 2) % 3];
      const Point mid{0.5 * (mesh.vertices[a].x + mesh.vertices[b].x),
                      0.5 * (mesh.vertices[a].y + mesh.vertices[b].y)};
      const double diff = 0.5 * (u_h[a] + u_h[b]) - exact(mid);
      sq += diff * diff;
    }
    l2 += area * sq / 3.0;

    const Point c{(mesh.vertices[tri[0]].x + mesh.vertices[tri[1]].x + mesh.vertices[tri[2]].x) / 3.0,
                  (mesh.vertices[tri[0]].y + mesh.vertices[tri[1]].y + mesh.vertices[tri[2]].y) / 3.0};
    const double rc = std::hypot(c.x, c.y);
    double gx = 0.0, gy = 0.0;
    if (rc > 0.0) {
      const double dv = sol.derivative(rc);
      gx = dv * c.x / rc;
      gy = dv * c.y / rc;
    }
    const double dx = grad_h[t].x - gx, dy = grad_h[t].y - gy;
    semi += area * (dx * dx + dy * dy);
    nodal_semi += area * (grad_e[t].x * grad_e[t].x + grad_e[t].y * grad_e[t].y);
  }
  e.l2 = std::sqrt(l2);
  e.h1_semi = std::sqrt(semi);
  e.h1 = std::hypot(e.l2, e.h1_semi);
  e.nodal_l2 = discrete_norm(nodal, mesh.patch_areas, 2.0);
  e.nodal_h1_semi = std::sqrt(nodal_semi);
  e.nodal_h1 = std::hypot(e.nodal_l2, e.nodal_h1_semi);
  return e;
}

}  // namespace maeig
