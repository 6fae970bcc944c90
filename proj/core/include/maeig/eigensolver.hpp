#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "maeig/fem.hpp"
#include "maeig/geometry.hpp"
#include "maeig/mesh.hpp"
#include "maeig/recovery.hpp"

namespace maeig {

enum class SolverMode { Inexact, Exact };

enum class HessianScheme {
  // Recovered deviatoric part, trace from the FE Laplacian (default).
  LaplacianTrace,
  // Plain double recovery everywhere.
  Recovered,
};

struct SolverConfig {
  double h = 1.0 / 40.0;
  DomainSpec domain = DomainSpec::make(DomainKind::UnitDisk);
  SolverMode mode = SolverMode::Inexact;
  double tol_outer = 1e-6;
  double xi_coefficient = 20.0;
  double xi_power = 1.1;
  double tol_eta2 = 1e-10;
  int max_inner = 15000;
  int max_outer = 200;
  double eta_init = 0.5;
  std::uint64_t seed = 0;
  HessianScheme hessian = HessianScheme::LaplacianTrace;
  // Rescale every outer iterate to unit discrete L2 norm.
  bool normalize = true;

  /// Throws std::invalid_argument on a bad combination.
  void validate() const;
};

/// State of outer iterate u_k.
struct IterationRecord {
  int k = 0;
  double lambda = 0.0;           // R^h(u_k)
  double eta1 = 0.0;
  int inner_iters = 0;           // Poisson solves spent producing u_k
  long cumulative_poisson = 0;   // includes the initial-guess solve
  double wall_ms = 0.0;          // since the start of the iteration
  double xi = 0.0;               // break threshold used to produce u_k (inexact)
  double inner_residual = 0.0;   // break-test value reached when u_k was accepted
  // Energy monitor for the step u_{k-1} -> u_k:
  //   R(u_k) ||u_k||_{L3}^2 <= R(u_{k-1}) ||u_{k-1}||_{L3}^2 + |Omega|^(1/3) xi_{k-1},
  // with u_k taken before rescaling. Zero for k = 0.
  double monitor_lhs = 0.0;
  double monitor_rhs = 0.0;
};

struct SolverReport {
  std::vector<IterationRecord> iterations;
  double lambda_h = 0.0;
  double min_u = 0.0;
  long total_poisson = 0;
  bool converged = false;
  double wall_ms = 0.0;
  double mesh_ms = 0.0;
  std::size_t num_vertices = 0;
  std::size_t num_triangles = 0;
  long stiffness_nonzeros = 0;
  double factor_ms = 0.0;
};

struct EigenResult {
  double lambda_h = 0.0;
  std::vector<double> u;
  SolverReport report;
};

/// solve_poisson with constant source eta_init (> 0): nonpositive, zero on the
/// boundary.
std::vector<double> initial_guess(const TriMesh& mesh, const PoissonSystem& system, double eta_init);

/// sum |omega_v| |u_v| det_v / sum |omega_v| |u_v|^3. Throws ZeroDenominator
/// when the denominator underflows 1e-300.
double rayleigh_quotient(std::span<const double> field, std::span<const double> det,
                         std::span<const double> areas);

/// ||det - R |u|^2||_h / (1 + R ||u||_h^2).
///
/// Pass det of u_k for eta_1, det of the candidate u_{k+1} for eta_2; `field`
/// and `rayleigh` always describe the current outer iterate u_k.
double residual_eta(std::span<const double> det, std::span<const double> field, double rayleigh,
                    std::span<const double> areas);

/// xi_coefficient * eta1 / (1 + k)^xi_power.
double xi_threshold(int k, double eta1, const SolverConfig& cfg);

/// sqrt(uxx^2 + uyy^2 + 2 uxy^2 + 2 source), radicand clamped at 0.
std::vector<double> fixed_point_rhs(const HessianField& hess, std::span<const double> source);

/// Discrete Hessian used by the eigensolver under the chosen scheme.
HessianField solver_hessian(const TriMesh& mesh, const PoissonSystem& system,
                            std::span<const double> field, HessianScheme scheme);

struct InnerResult {
  std::vector<double> u;
  int poisson_solves = 0;
  double residual = 0.0;  // break-test value at acceptance
  HessianField hessian;   // of u
  std::vector<double> det;
};

/// Poisson fixed-point iteration for det D^2 u = R_k u_k^2 starting from u_k.
/// Inexact mode stops once the discrete L3 residual drops to xi_k; Exact mode
/// once eta_2 < tol_eta2. Throws InnerStall after max_inner solves.
InnerResult inner_solve(const TriMesh& mesh, const PoissonSystem& system,
                        std::span<const double> u_k, double rayleigh_k, const SolverConfig& cfg,
                        double xi_k);

/// Generates the mesh and runs the outer loop.
EigenResult solve_eigenproblem(const SolverConfig& cfg);

/// Runs the outer loop on a given mesh and factorization.
EigenResult solve_eigenproblem(const SolverConfig& cfg, const TriMesh& mesh,
                               const PoissonSystem& system);

}  // namespace maeig
