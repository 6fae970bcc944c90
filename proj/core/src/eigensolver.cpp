#include "maeig/eigensolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "maeig/errors.hpp"

namespace maeig {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
  return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

std::vector<double> squared_source(std::span<const double> u, double rayleigh) {
  std::vector<double> f(u.size());
  for (std::size_t v = 0; v < u.size(); ++v) f[v] = rayleigh * u[v] * u[v];
  return f;
}

void scale_in_place(std::vector<double>& u, double s) {
  for (double& x : u) x *= s;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(h > 0.0 && h <= 0.5)) throw std::invalid_argument("h must lie in (0, 0.5]");
  if (!(tol_outer > 0.0)) throw std::invalid_argument("tol_outer must be positive");
  if (!(xi_coefficient > 0.0)) throw std::invalid_argument("xi_coefficient must be positive");
  if (!(xi_power > 1.0)) throw std::invalid_argument("xi_power must exceed 1 (summable schedule)");
  if (!(tol_eta2 > 0.0)) throw std::invalid_argument("tol_eta2 must be positive");
  if (max_inner < 1) throw std::invalid_argument("max_inner must be >= 1");
  if (max_outer < 1) throw std::invalid_argument("max_outer must be >= 1");
  if (!(eta_init > 0.0)) throw std::invalid_argument("eta_init must be positive");
}

std::vector<double> initial_guess(const TriMesh& mesh, const PoissonSystem& system, double eta_init) {
  if (!(eta_init > 0.0)) throw std::invalid_argument("initial_guess: eta_init must be positive");
  const std::vector<double> source(mesh.num_vertices(), eta_init);
  return solve_poisson(system, source);
}

double rayleigh_quotient(std::span<const double> field, std::span<const double> det,
                         std::span<const double> areas) {
  if (field.size() != det.size() || field.size() != areas.size()) {
    throw std::invalid_argument("rayleigh_quotient: length mismatch");
  }
  double num = 0.0, den = 0.0;
  for (std::size_t v = 0; v < field.size(); ++v) {
    const double a = std::abs(field[v]);
    num += areas[v] * a * det[v];
    den += areas[v] * a * a * a;
  }
  if (den < 1e-300) throw ZeroDenominator("rayleigh_quotient: field vanishes");
  return num / den;
}

double residual_eta(std::span<const double> det, std::span<const double> field, double rayleigh,
                    std::span<const double> areas) {
  if (det.size() != field.size() || field.size() != areas.size()) {
    throw std::invalid_argument("residual_eta: length mismatch");
  }
  double num = 0.0, norm2 = 0.0;
  for (std::size_t v = 0; v < field.size(); ++v) {
    const double r = det[v] - rayleigh * field[v] * field[v];
    num += areas[v] * r * r;
    norm2 += areas[v] * field[v] * field[v];
  }
  return std::sqrt(num / 3.0) / (1.0 + rayleigh * norm2 / 3.0);
}

double xi_threshold(int k, double eta1, const SolverConfig& cfg) {
  return cfg.xi_coefficient * eta1 / std::pow(1.0 + k, cfg.xi_power);
}

std::vector<double> fixed_point_rhs(const HessianField& hess, std::span<const double> source) {
  if (source.size() != hess.size()) throw std::invalid_argument("fixed_point_rhs: length mismatch");
  std::vector<double> g(hess.size());
  for (std::size_t v = 0; v < g.size(); ++v) {
    const double radicand = hess.uxx[v] * hess.uxx[v] + hess.uyy[v] * hess.uyy[v] +
                            2.0 * hess.uxy[v] * hess.uxy[v] + 2.0 * source[v];
    g[v] = std::sqrt(std::max(radicand, 0.0));
  }
  return g;
}

HessianField solver_hessian(const TriMesh& mesh, const PoissonSystem& system,
                            std::span<const double> field, HessianScheme scheme) {
  if (scheme == HessianScheme::Recovered) return recover_hessian(mesh, field);
  return discrete_hessian(mesh, system, field);
}

InnerResult inner_solve(const TriMesh& mesh, const PoissonSystem& system,
                        std::span<const double> u_k, double rayleigh_k, const SolverConfig& cfg,
                        double xi_k) {
  if (!(rayleigh_k > 0.0)) throw std::invalid_argument("inner_solve: Rayleigh quotient must be positive");
  if (cfg.mode == SolverMode::Inexact && !(xi_k > 0.0)) {
    throw std::invalid_argument("inner_solve: xi_k must be positive in inexact mode");
  }
  const auto& areas = mesh.patch_areas;
  const std::vector<double> target = squared_source(u_k, rayleigh_k);
  std::vector<double> diff(u_k.size());

  InnerResult out;
  out.u.assign(u_k.begin(), u_k.end());
  out.hessian = solver_hessian(mesh, system, out.u, cfg.hessian);
  double best = std::numeric_limits<double>::infinity();

  for (int n = 0; n < cfg.max_inner; ++n) {
    out.u = solve_poisson(system, fixed_point_rhs(out.hessian, target));
    ++out.poisson_solves;
    out.hessian = solver_hessian(mesh, system, out.u, cfg.hessian);
    out.det = hessian_determinant(out.hessian);

    bool done;
    if (cfg.mode == SolverMode::Inexact) {
      for (std::size_t v = 0; v < diff.size(); ++v) diff[v] = out.det[v] - target[v];
      out.residual = discrete_norm(diff, areas, 3.0);
      done = out.residual <= xi_k;
    } else {
      out.residual = residual_eta(out.det, u_k, rayleigh_k, areas);
      done = out.residual < cfg.tol_eta2;
    }
    best = std::min(best, out.residual);
    if (done) return out;
    if (!std::isfinite(out.residual)) break;
  }
  throw InnerStall("inner fixed-point iteration stalled after " + std::to_string(out.poisson_solves) +
                       " Poisson solves (best residual " + std::to_string(best) + ")",
                   best, out.poisson_solves);
}

EigenResult solve_eigenproblem(const SolverConfig& cfg) {
  cfg.validate();
  const auto t0 = Clock::now();
  const TriMesh mesh = generate_mesh(cfg.domain, cfg.h, cfg.seed);
  const double mesh_ms = elapsed_ms(t0);
  const PoissonSystem system = assemble_system(mesh);
  EigenResult result = solve_eigenproblem(cfg, mesh, system);
  result.report.mesh_ms = mesh_ms;
  return result;
}

EigenResult solve_eigenproblem(const SolverConfig& cfg, const TriMesh& mesh,
                               const PoissonSystem& system) {
  cfg.validate();
  if (system.mesh_fingerprint() != mesh_fingerprint(mesh)) {
    throw std::invalid_argument("solve_eigenproblem: system was assembled on a different mesh");
  }
  const auto start = Clock::now();
  const auto& areas = mesh.patch_areas;
  const double omega_factor = std::cbrt(cfg.domain.area);

  EigenResult result;
  SolverReport& report = result.report;
  report.num_vertices = mesh.num_vertices();
  report.num_triangles = mesh.num_triangles();
  report.stiffness_nonzeros = system.nonzeros();
  report.factor_ms = system.factor_ms();

  std::vector<double> u = initial_guess(mesh, system, cfg.eta_init);
  if (cfg.normalize) scale_in_place(u, 1.0 / discrete_norm(u, areas, 2.0));
  std::vector<double> det = hessian_determinant(solver_hessian(mesh, system, u, cfg.hessian));
  long poisson = 1;

  IterationRecord rec;
  rec.k = 0;
  rec.inner_iters = 1;

  for (int k = 0;; ++k) {
    const double rayleigh = rayleigh_quotient(u, det, areas);
    const double eta1 = residual_eta(det, u, rayleigh, areas);
    rec.k = k;
    rec.lambda = rayleigh;
    rec.eta1 = eta1;
    rec.cumulative_poisson = poisson;
    rec.wall_ms = elapsed_ms(start);
    report.iterations.push_back(rec);

    if (eta1 < cfg.tol_outer) {
      report.converged = true;
      break;
    }
    if (k >= cfg.max_outer) {
      throw OuterStall("outer iteration did not reach eta1 < " + std::to_string(cfg.tol_outer) +
                       " within " + std::to_string(cfg.max_outer) + " iterations (eta1 = " +
                       std::to_string(eta1) + ")");
    }

    const double xi = cfg.mode == SolverMode::Inexact ? xi_threshold(k, eta1, cfg) : 0.0;
    InnerResult inner = inner_solve(mesh, system, u, rayleigh, cfg, xi);
    poisson += inner.poisson_solves;

    const double l3_cur = discrete_norm(u, areas, 3.0);
    const double l3_next = discrete_norm(inner.u, areas, 3.0);
    const double rayleigh_next = rayleigh_quotient(inner.u, inner.det, areas);

    rec = IterationRecord{};
    rec.inner_iters = inner.poisson_solves;
    rec.xi = xi;
    rec.inner_residual = inner.residual;
    rec.monitor_lhs = rayleigh_next * l3_next * l3_next;
    rec.monitor_rhs = rayleigh * l3_cur * l3_cur + omega_factor * xi;

    u = std::move(inner.u);
    det = std::move(inner.det);
    if (cfg.normalize) {
      // det is 2-homogeneous in u.
      const double s = 1.0 / discrete_norm(u, areas, 2.0);
      scale_in_place(u, s);
      scale_in_place(det, s * s);
    }
  }

  report.lambda_h = report.iterations.back().lambda;
  report.min_u = *std::min_element(u.begin(), u.end());
  report.total_poisson = poisson;
  report.wall_ms = elapsed_ms(start);
  result.lambda_h = report.lambda_h;
  result.u = std::move(u);
  return result;
}

}  // namespace maeig
