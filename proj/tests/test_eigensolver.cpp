#include <cmath>
#include <numbers>

#include "doctest.h"
#include "maeig/eigensolver.hpp"
#include "maeig/errors.hpp"
#include "support.hpp"

using namespace maeig;

namespace {

struct Fixture {
  TriMesh mesh;
  PoissonSystem system;
};

const Fixture& disk20() {
  static const Fixture f = [] {
    Fixture out;
    out.mesh = generate_mesh(DomainSpec::make(DomainKind::UnitDisk), 1.0 / 20.0, 0);
    out.system = assemble_system(out.mesh);
    return out;
  }();
  return f;
}

SolverConfig disk_config(double h, SolverMode mode = SolverMode::Inexact) {
  SolverConfig cfg;
  cfg.h = h;
  cfg.mode = mode;
  return cfg;
}

}  // namespace

TEST_CASE("xi schedule") {
  SolverConfig cfg;
  CHECK(xi_threshold(0, 0.05, cfg) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(xi_threshold(9, 1e-4, cfg) == doctest::Approx(20e-4 / std::pow(10.0, 1.1)).epsilon(1e-15));
  CHECK(xi_threshold(9, 1e-4, cfg) == doctest::Approx(1.589e-4).epsilon(1e-3));
  CHECK(xi_threshold(4, 0.0, cfg) == 0.0);
}

TEST_CASE("fixed-point right-hand side") {
  auto g = [](double a, double b, double c, double s) {
    return fixed_point_rhs(HessianField{{a}, {b}, {c}}, std::vector<double>{s})[0];
  };
  CHECK(g(0, 0, 0, 2) == doctest::Approx(2.0));
  CHECK(g(2, 0, 2, 0) == doctest::Approx(std::sqrt(8.0)));
  CHECK(g(1, 1, 1, 0.5) == doctest::Approx(std::sqrt(5.0)));
  // roundoff below zero is clamped
  CHECK(g(0, 0, 0, -1e-17) == 0.0);
}

TEST_CASE("Rayleigh quotient") {
  const std::vector<double> area{0.3};
  CHECK(rayleigh_quotient(std::vector<double>{-1.0}, std::vector<double>{5.0}, area) == doctest::Approx(5.0));
  CHECK_THROWS_AS(rayleigh_quotient(std::vector<double>{0.0}, std::vector<double>{5.0}, area), ZeroDenominator);

  const Fixture& f = disk20();
  const auto u = test::sample(f.mesh, [](double x, double y) { return 0.3 * (x * x + y * y - 1.0) + 0.01 * x; });
  const auto det = hessian_determinant(recover_hessian(f.mesh, u));
  const double r = rayleigh_quotient(u, det, f.mesh.patch_areas);
  std::vector<double> cu(u.size()), cdet(u.size());
  for (std::size_t v = 0; v < u.size(); ++v) {
    cu[v] = 3.0 * u[v];
    cdet[v] = 9.0 * det[v];
  }
  CHECK(rayleigh_quotient(cu, cdet, f.mesh.patch_areas) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("Rayleigh quotient of the disk paraboloid tends to 8") {
  // int |u| / int |u|^3 for u = (r^2 - 1) / 2 with det D^2 u = 1
  double previous = 1e300;
  for (double h : {1.0 / 10.0, 1.0 / 20.0, 1.0 / 40.0}) {
    const TriMesh mesh = generate_mesh(DomainSpec::make(DomainKind::UnitDisk), h, 0);
    const auto u = test::sample(mesh, [](double x, double y) { return 0.5 * (x * x + y * y - 1.0); });
    const double r = rayleigh_quotient(u, std::vector<double>(u.size(), 1.0), mesh.patch_areas);
    const double err = std::abs(r - 8.0);
    CAPTURE(h);
    CHECK(err < previous);
    previous = err;
    if (h == 1.0 / 40.0) CHECK(err <= 0.2);
  }
}

TEST_CASE("residual eta") {
  const std::vector<double> area{3.0};
  CHECK(residual_eta(std::vector<double>{4.0}, std::vector<double>{-1.0}, 2.0, area) ==
        doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(residual_eta(std::vector<double>{0.0}, std::vector<double>{0.0}, 0.0, area) == 0.0);

  const Fixture& f = disk20();
  const auto u = test::sample(f.mesh, [](double x, double y) { return x * x + y * y - 1.0; });
  std::vector<double> det(u.size());
  for (std::size_t v = 0; v < u.size(); ++v) det[v] = 1.7 * u[v] * u[v];
  CHECK(residual_eta(det, u, 1.7, f.mesh.patch_areas) == 0.0);
}

TEST_CASE("initial guess") {
  const Fixture& f = disk20();
  const double h = 1.0 / 20.0;
  const auto u0 = initial_guess(f.mesh, f.system, 0.5);
  double lo = 0.0, worst = 0.0;
  for (std::size_t v = 0; v < u0.size(); ++v) {
    const Point p = f.mesh.vertices[v];
    worst = std::max(worst, std::abs(u0[v] - (p.x * p.x + p.y * p.y - 1.0) / 8.0));
    lo = std::min(lo, u0[v]);
    if (f.mesh.is_boundary(v)) {
      CHECK(u0[v] == 0.0);
    } else {
      CHECK(u0[v] < 0.0);
    }
  }
  CHECK(worst <= 5.0 * h * h);
  CHECK(lo == doctest::Approx(-0.125).epsilon(5.0 * h * h / 0.125));
  CHECK_THROWS_AS(initial_guess(f.mesh, f.system, 0.0), std::invalid_argument);
}

TEST_CASE("config validation") {
  SolverConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  auto bad = [](auto mutate) {
    SolverConfig c;
    mutate(c);
    return c;
  };
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.tol_outer = 0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.xi_power = 1.0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.max_inner = 0; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.h = 0.7; }).validate(), std::invalid_argument);
  CHECK_THROWS_AS(bad([](SolverConfig& c) { c.eta_init = -1; }).validate(), std::invalid_argument);
}

TEST_CASE("inexact solve on the coarse disk") {
  const Fixture& f = disk20();
  const EigenResult res = solve_eigenproblem(disk_config(1.0 / 20.0), f.mesh, f.system);
  const SolverReport& r = res.report;
  REQUIRE(r.converged);
  CHECK(r.iterations.back().eta1 < 1e-6);
  CHECK(res.lambda_h == r.iterations.back().lambda);
  CHECK(r.iterations.size() <= 40);
  for (std::size_t i = 1; i < r.iterations.size(); ++i) {
    CHECK(r.iterations[i].cumulative_poisson > r.iterations[i - 1].cumulative_poisson);
    CHECK(r.iterations[i].k == static_cast<int>(i));
  }
  CHECK(r.total_poisson == r.iterations.back().cumulative_poisson);
  for (std::size_t v = 0; v < res.u.size(); ++v) {
    if (f.mesh.is_boundary(v)) CHECK(res.u[v] == 0.0);
    CHECK(res.u[v] <= 0.0);
  }
  CHECK(discrete_norm(res.u, f.mesh.patch_areas, 2) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(res.lambda_h == doctest::Approx(7.49).epsilon(2e-3));
}

TEST_CASE("the converged eigenpair is a fixed point of the inner iteration") {
  const Fixture& f = disk20();
  SolverConfig cfg = disk_config(1.0 / 20.0);
  const EigenResult res = solve_eigenproblem(cfg, f.mesh, f.system);
  const InnerResult inner = inner_solve(f.mesh, f.system, res.u, res.lambda_h, cfg, 1.0);
  CHECK(inner.poisson_solves == 1);
  CHECK(inner.residual < 1e-4);
}

TEST_CASE("first inner solve from the initial guess is cheap") {
  SolverConfig cfg = disk_config(1.0 / 40.0);
  const EigenResult res = solve_eigenproblem(cfg);
  REQUIRE(res.report.iterations.size() > 1);
  CHECK(res.report.iterations[1].inner_iters <= 50);
}

TEST_CASE("exact mode matches the inexact eigenvalue with more Poisson solves") {
  const Fixture& f = disk20();
  const EigenResult inexact = solve_eigenproblem(disk_config(1.0 / 20.0), f.mesh, f.system);
  const EigenResult exact = solve_eigenproblem(disk_config(1.0 / 20.0, SolverMode::Exact), f.mesh, f.system);
  CHECK(exact.report.converged);
  CHECK(std::abs(exact.lambda_h - inexact.lambda_h) <= 1e-6 * exact.lambda_h);
  CHECK(inexact.report.total_poisson < exact.report.total_poisson);
}

TEST_CASE("solver failure modes") {
  const Fixture& f = disk20();
  SUBCASE("outer cap") {
    SolverConfig cfg = disk_config(1.0 / 20.0);
    cfg.max_outer = 2;
    CHECK_THROWS_AS(solve_eigenproblem(cfg, f.mesh, f.system), OuterStall);
  }
  SUBCASE("inner cap") {
    SolverConfig cfg = disk_config(1.0 / 20.0, SolverMode::Exact);
    cfg.max_inner = 1;
    try {
      solve_eigenproblem(cfg, f.mesh, f.system);
      FAIL("expected InnerStall");
    } catch (const InnerStall& e) {
      CHECK(e.iterations() == 1);
      CHECK(e.best_residual() > 0.0);
    }
  }
  SUBCASE("system from another mesh") {
    const TriMesh other = generate_mesh(DomainSpec::make(DomainKind::UnitDisk), 1.0 / 20.0, 1);
    CHECK_THROWS_AS(solve_eigenproblem(disk_config(1.0 / 20.0), other, f.system), std::invalid_argument);
  }
  SUBCASE("inner solve preconditions") {
    const auto u0 = initial_guess(f.mesh, f.system, 0.5);
    CHECK_THROWS_AS(inner_solve(f.mesh, f.system, u0, 0.0, disk_config(0.05), 1.0), std::invalid_argument);
    CHECK_THROWS_AS(inner_solve(f.mesh, f.system, u0, 8.0, disk_config(0.05), 0.0), std::invalid_argument);
  }
}
