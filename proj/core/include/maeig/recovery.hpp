#pragma once

#include <span>
#include <vector>

#include "maeig/fem.hpp"
#include "maeig/mesh.hpp"

namespace maeig {

/// Nodal second derivatives. The mixed derivative is stored once.
struct HessianField {
  std::vector<double> uxx;
  std::vector<double> uxy;
  std::vector<double> uyy;

  std::size_t size() const { return uxx.size(); }
};

/// Area-weighted average of the incident element gradients at every vertex,
/// boundary vertices included (one-sided patches).
std::vector<Gradient> recover_gradient(const TriMesh& mesh, std::span<const double> field);

/// Double gradient recovery: recover the gradient, then recover the gradient
/// of each component. uxy is the symmetrized mixed derivative.
HessianField recover_hessian(const TriMesh& mesh, std::span<const double> field);

/// uxx * uyy - uxy^2 per vertex.
std::vector<double> hessian_determinant(const HessianField& hess);

/// Recovered Hessian whose trace is replaced by the nodal FE Laplacian at
/// interior vertices:
///
///   H_v + ((Lap_h u)_v - tr H_v) / 2 * I.
///
/// The deviatoric part comes from recovery; the trace matches the operator
/// inverted by solve_poisson, so a fixed point of the Poisson iteration
/// satisfies det = f exactly at the nodes. Boundary vertices carry zeros:
/// the discrete equation is not posed there.
HessianField discrete_hessian(const TriMesh& mesh, const PoissonSystem& system,
                              std::span<const double> field);

}  // namespace maeig
