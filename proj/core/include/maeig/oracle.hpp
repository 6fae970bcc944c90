#pragma once

#include <span>
#include <vector>

#include "maeig/mesh.hpp"

namespace maeig {

/// Radial profile v(r) of the disk eigenfunction on a uniform grid over [0, 1].
struct RadialSolution {
  std::vector<double> r;
  std::vector<double> v;   // <= 0
  std::vector<double> dv;  // v'(r) >= 0
  double lambda = 0.0;
  double scale = 1.0;      // factor applied by normalization

  double center_value() const { return v.front(); }
  /// Cubic Hermite interpolation of v and v' at r in [0, 1].
  double value(double radius) const;
  double derivative(double radius) const;
};

/// Integrates v' = p, p' = lambda r v^2 / p from r = 1e-4 with classical RK4,
/// starting from the series v = v0 + sqrt(lambda)|v0| r^2 / 2,
/// p = sqrt(lambda)|v0| r. Throws BlowUp if p becomes nonpositive.
RadialSolution integrate_radial(double lambda, double v0, int n_steps);

/// Root of lambda -> v(1; lambda) with v0 = -1, bracketed in [1, 50].
/// Throws NoBracket if v(1) does not change sign there.
double shoot_lambda(double tol, double v0 = -1.0, int n_steps = 10000);

/// Rescales v so that 2 pi int_0^1 v^2 r dr = 1 (composite Simpson).
RadialSolution normalized_profile(const RadialSolution& sol);

/// Shoots, integrates and normalizes in one call.
RadialSolution disk_reference(double tol = 1e-12, int n_steps = 10000);

/// 2 pi int_0^1 v^2 r dr on the solution grid.
double radial_mass(const RadialSolution& sol);

struct ErrorNorms {
  // Continuous norms: (u_h - u)^2 by the edge-midpoint rule, gradient error
  // at the centroid; h1 = sqrt(l2^2 + semi^2).
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1 = 0.0;
  // Nodal error e = u_h - I_h u: ||e||_h, and the P1 gradient of e.
  double nodal_l2 = 0.0;
  double nodal_h1_semi = 0.0;
  double nodal_h1 = 0.0;
};

/// Errors of a nodal field on a disk mesh against the radial reference
/// u(x, y) = v(|(x, y)|).
ErrorNorms error_norms(const TriMesh& mesh, std::span<const double> u_h, const RadialSolution& sol);

}  // namespace maeig
