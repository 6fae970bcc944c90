#include "harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"

#include "maeig/errors.hpp"
#include "maeig/mesh_io.hpp"

namespace maeig::harness {

namespace fs = std::filesystem;

namespace {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// MAEIG_LOG=error|warn|info|debug
LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("MAEIG_LOG");
    if (env == nullptr) return LogLevel::Warn;
    const std::string value(env);
    if (value == "error") return LogLevel::Error;
    if (value == "info") return LogLevel::Info;
    if (value == "debug") return LogLevel::Debug;
    return LogLevel::Warn;
  }();
  return level;
}

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

void log(LogLevel level, const std::string& message) {
  if (level > log_level()) return;
  static constexpr const char* tags[] = {"error", "warn", "info", "debug"};
  std::lock_guard lock(log_mutex());
  std::cerr << "[maeig " << tags[static_cast<int>(level)] << "] " << message << '\n';
}

std::string_view algorithm_name(SolverMode mode) {
  return mode == SolverMode::Inexact ? "iAKI-FP" : "AKI";
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

std::string cell_label(double h) { return "h=1/" + format_real(1.0 / h); }

// Runs fn(i) for i in [0, n) with at most `jobs` concurrent cells, keeping
// results in index order.
template <typename Fn>
auto run_cells(std::size_t n, int jobs, Fn fn) {
  using Result = decltype(fn(std::size_t{0}));
  std::vector<Result> results;
  results.reserve(n);
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) results.push_back(fn(i));
    return results;
  }
  for (std::size_t start = 0; start < n; start += static_cast<std::size_t>(jobs)) {
    const std::size_t stop = std::min(n, start + static_cast<std::size_t>(jobs));
    std::vector<std::future<Result>> batch;
    for (std::size_t i = start; i < stop; ++i) {
      batch.push_back(std::async(std::launch::async, fn, i));
    }
    for (auto& f : batch) results.push_back(f.get());
  }
  return results;
}

nlohmann::json config_json(const SolverConfig& s) {
  return {
      {"tol_outer", s.tol_outer},   {"xi_coefficient", s.xi_coefficient},
      {"xi_power", s.xi_power},     {"tol_eta2", s.tol_eta2},
      {"max_inner", s.max_inner},   {"max_outer", s.max_outer},
      {"eta_init", s.eta_init},
  };
}

}  // namespace

void validate(const ExperimentConfig& cfg) {
  if (!parse_domain(cfg.domain)) throw UsageError("unknown domain '" + cfg.domain + "'");
  if (cfg.h.empty()) throw UsageError("at least one --h is required");
  for (double h : cfg.h) {
    if (!(h > 0.0 && h <= 0.5)) throw UsageError("h must lie in (0, 0.5], got " + format_real(h));
  }
  if (cfg.jobs < 1) throw UsageError("--jobs must be at least 1");
  switch (cfg.command) {
    case Command::Solve:
      if (cfg.h.size() != 1) throw UsageError("solve takes exactly one --h");
      if (cfg.mode == ModeSelect::Both) throw UsageError("solve needs --mode inexact or exact");
      break;
    case Command::Compare:
      break;
    case Command::Convergence:
      if (cfg.domain != "disk") throw UsageError("convergence requires --domain disk");
      if (cfg.h.size() < 2) throw UsageError("convergence needs at least two --h values");
      for (std::size_t i = 1; i < cfg.h.size(); ++i) {
        if (std::abs(cfg.h[i - 1] / cfg.h[i] - 2.0) > 1e-9) {
          throw UsageError("convergence --h values must halve successively");
        }
      }
      if (cfg.mode == ModeSelect::Both) {
        throw UsageError("convergence needs --mode inexact or exact");
      }
      break;
  }
  try {
    SolverConfig probe = cell_config(cfg, cfg.h.front(), SolverMode::Inexact);
    probe.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
}

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

SolverConfig cell_config(const ExperimentConfig& cfg, double h, SolverMode mode) {
  SolverConfig s = cfg.solver;
  s.domain = DomainSpec::make(*parse_domain(cfg.domain));
  s.h = h;
  s.mode = mode;
  s.seed = cfg.seed;
  return s;
}

nlohmann::json report_json(const SolverConfig& solver, std::string_view domain,
                           const EigenResult& result) {
  const SolverReport& r = result.report;
  nlohmann::json trace = nlohmann::json::array();
  for (const IterationRecord& it : r.iterations) {
    trace.push_back({
        {"k", it.k},
        {"lambda", it.lambda},
        {"eta1", it.eta1},
        {"inner_iters", it.inner_iters},
        {"cumulative_poisson", it.cumulative_poisson},
        {"wall_ms", it.wall_ms},
        {"xi", it.xi},
        {"inner_residual", it.inner_residual},
        {"monitor_lhs", it.monitor_lhs},
        {"monitor_rhs", it.monitor_rhs},
    });
  }
  return {
      {"domain", domain},
      {"h", solver.h},
      {"mode", solver.mode == SolverMode::Inexact ? "inexact" : "exact"},
      {"seed", solver.seed},
      {"config", config_json(solver)},
      {"lambda_h", result.lambda_h},
      {"min_u", r.min_u},
      {"converged", r.converged},
      {"total_poisson", r.total_poisson},
      {"wall_ms", r.wall_ms},
      {"mesh",
       {{"num_vertices", r.num_vertices},
        {"num_triangles", r.num_triangles},
        {"mesh_ms", r.mesh_ms},
        {"stiffness_nonzeros", r.stiffness_nonzeros},
        {"factor_ms", r.factor_ms}}},
      {"trace", trace},
  };
}

EigenResult run_solve(const ExperimentConfig& cfg) {
  validate(cfg);
  fs::create_directories(cfg.out_dir);
  const SolverMode mode = cfg.mode == ModeSelect::Exact ? SolverMode::Exact : SolverMode::Inexact;
  const SolverConfig solver = cell_config(cfg, cfg.h.front(), mode);

  const auto mesh_start = std::chrono::steady_clock::now();
  TriMesh mesh = generate_mesh(solver.domain, solver.h, solver.seed);
  const double mesh_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - mesh_start).count();
  if (cfg.dump_mesh) write_mesh((cfg.out_dir / "mesh.txt").string(), mesh);
  const PoissonSystem system = assemble_system(mesh);
  log(LogLevel::Info, std::string(algorithm_name(mode)) + " " + cfg.domain + " " +
                          cell_label(solver.h) + ": " + std::to_string(mesh.num_vertices()) +
                          " vertices");

  EigenResult result = solve_eigenproblem(solver, mesh, system);
  result.report.mesh_ms = mesh_ms;

  {
    auto out = open_output(cfg.out_dir / "report.json");
    out << report_json(solver, cfg.domain, result).dump(2) << '\n';
  }
  {
    auto out = open_output(cfg.out_dir / "trace.csv");
    out << "k,lambda,eta1,inner_iters,cumulative_poisson,wall_ms\n";
    for (const IterationRecord& it : result.report.iterations) {
      out << it.k << ',' << format_real(it.lambda) << ',' << format_real(it.eta1) << ','
          << it.inner_iters << ',' << it.cumulative_poisson << ',' << format_real(it.wall_ms)
          << '\n';
    }
  }
  {
    auto out = open_output(cfg.out_dir / "solution.csv");
    out << "x,y,u,boundary\n";
    for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
      out << format_real(mesh.vertices[v].x) << ',' << format_real(mesh.vertices[v].y) << ','
          << format_real(result.u[v]) << ',' << (mesh.is_boundary(v) ? 1 : 0) << '\n';
    }
  }
  log(LogLevel::Info, "lambda_h = " + format_real(result.lambda_h));
  return result;
}

std::vector<CompareRow> run_compare(const ExperimentConfig& cfg) {
  validate(cfg);
  fs::create_directories(cfg.out_dir);

  auto cell = [&](std::size_t i) {
    const double h = cfg.h[i];
    std::vector<CompareRow> rows;
    const SolverConfig base = cell_config(cfg, h, SolverMode::Inexact);
    TriMesh mesh;
    PoissonSystem system;
    try {
      mesh = generate_mesh(base.domain, h, base.seed);
      system = assemble_system(mesh);
    } catch (const Error& e) {
      rows.push_back({.algorithm = "FAILED:mesh", .h = h, .error = e.what()});
      return rows;
    }
    for (SolverMode mode : {SolverMode::Inexact, SolverMode::Exact}) {
      const SolverConfig solver = cell_config(cfg, h, mode);
      try {
        const EigenResult res = solve_eigenproblem(solver, mesh, system);
        const IterationRecord& last = res.report.iterations.back();
        rows.push_back({.algorithm = std::string(algorithm_name(mode)),
                        .h = h,
                        .iter = last.k,
                        .eta1 = last.eta1,
                        .lambda_h = res.lambda_h,
                        .min_u = res.report.min_u,
                        .time_s = res.report.wall_ms / 1000.0,
                        .poisson = res.report.total_poisson});
        log(LogLevel::Info, std::string(algorithm_name(mode)) + " " + cell_label(h) +
                                ": lambda_h = " + format_real(res.lambda_h));
      } catch (const Error& e) {
        log(LogLevel::Error, std::string(algorithm_name(mode)) + " " + cell_label(h) + ": " +
                                 e.what());
        rows.push_back({.algorithm = "FAILED:" + std::string(algorithm_name(mode)),
                        .h = h,
                        .error = e.what()});
      }
    }
    return rows;
  };

  std::vector<CompareRow> rows;
  for (auto& cell_rows : run_cells(cfg.h.size(), cfg.jobs, cell)) {
    rows.insert(rows.end(), cell_rows.begin(), cell_rows.end());
  }

  auto out = open_output(cfg.out_dir / "compare.csv");
  out << "algorithm,h,iter,eta1,lambda_h,min_u,time_s,poisson\n";
  for (const CompareRow& r : rows) {
    out << r.algorithm << ',' << format_real(r.h);
    if (r.failed()) {
      out << ",,,,,,\n";
      continue;
    }
    out << ',' << r.iter << ',' << format_real(r.eta1) << ',' << format_real(r.lambda_h) << ','
        << format_real(r.min_u) << ',' << format_real(r.time_s) << ',' << r.poisson << '\n';
  }
  return rows;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg) {
  validate(cfg);
  fs::create_directories(cfg.out_dir);
  const SolverMode mode = cfg.mode == ModeSelect::Exact ? SolverMode::Exact : SolverMode::Inexact;
  const RadialSolution reference = disk_reference();

  auto cell = [&](std::size_t i) {
    const SolverConfig solver = cell_config(cfg, cfg.h[i], mode);
    const TriMesh mesh = generate_mesh(solver.domain, solver.h, solver.seed);
    const PoissonSystem system = assemble_system(mesh);
    const EigenResult res = solve_eigenproblem(solver, mesh, system);
    ConvergenceRow row;
    row.h = solver.h;
    row.errors = error_norms(mesh, res.u, reference);
    log(LogLevel::Info, cell_label(solver.h) + ": lambda_h = " + format_real(res.lambda_h) +
                            ", l2 = " + format_real(row.errors.nodal_l2) +
                            ", h1 = " + format_real(row.errors.nodal_h1));
    return row;
  };
  std::vector<ConvergenceRow> rows = run_cells(cfg.h.size(), cfg.jobs, cell);

  auto rate = [](double coarse, double fine, double h_coarse, double h_fine) {
    return std::log(coarse / fine) / std::log(h_coarse / h_fine);
  };
  for (std::size_t i = 1; i < rows.size(); ++i) {
    rows[i].l2_rate = rate(rows[i - 1].errors.nodal_l2, rows[i].errors.nodal_l2, rows[i - 1].h, rows[i].h);
    rows[i].h1_rate = rate(rows[i - 1].errors.nodal_h1, rows[i].errors.nodal_h1, rows[i - 1].h, rows[i].h);
  }

  auto opt = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string(); };
  {
    auto out = open_output(cfg.out_dir / "convergence.csv");
    out << "h,l2_error,l2_rate,h1_error,h1_rate\n";
    for (const ConvergenceRow& r : rows) {
      out << format_real(r.h) << ',' << format_real(r.errors.nodal_l2) << ',' << opt(r.l2_rate)
          << ',' << format_real(r.errors.nodal_h1) << ',' << opt(r.h1_rate) << '\n';
    }
  }
  {
    auto out = open_output(cfg.out_dir / "convergence_detail.csv");
    out << "h,nodal_l2,nodal_h1_semi,nodal_h1,l2,h1_semi,h1\n";
    for (const ConvergenceRow& r : rows) {
      const ErrorNorms& e = r.errors;
      out << format_real(r.h) << ',' << format_real(e.nodal_l2) << ','
          << format_real(e.nodal_h1_semi) << ',' << format_real(e.nodal_h1) << ','
          << format_real(e.l2) << ',' << format_real(e.h1_semi) << ',' << format_real(e.h1)
          << '\n';
    }
  }
  return rows;
}

void write_profile(const fs::path& path, const RadialSolution& sol) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  auto out = open_output(path);
  out << "# r v  (lambda = " << format_real(sol.lambda) << ")\n";
  for (std::size_t i = 0; i < sol.r.size(); ++i) {
    out << format_real(sol.r[i]) << ' ' << format_real(sol.v[i]) << '\n';
  }
}

namespace {

void add_common_options(CLI::App& app, ExperimentConfig& cfg, std::string& mode) {
  app.add_option("--domain", cfg.domain, "disk | ellipse | smoothsq | square")
      ->check(CLI::IsMember({"disk", "ellipse", "smoothsq", "square"}));
  app.add_option("--h", cfg.h, "mesh size; repeat for several (accepts 1/40)")
      ->transform([](std::string value) {
        const auto slash = value.find('/');
        if (slash == std::string::npos) return value;
        try {
          const double num = std::stod(value.substr(0, slash));
          const double den = std::stod(value.substr(slash + 1));
          value = format_real(num / den);
        } catch (const std::exception&) {
          throw CLI::ValidationError("--h", "cannot parse '" + value + "'");
        }
        return value;
      })
      ->take_all();
  app.add_option("--mode", mode, "inexact | exact | both")
      ->check(CLI::IsMember({"inexact", "exact", "both"}));
  app.add_option("--seed", cfg.seed, "mesh jitter seed");
  app.add_option("--tol-outer", cfg.solver.tol_outer, "eta1 stopping tolerance");
  app.add_option("--xi-coeff", cfg.solver.xi_coefficient, "inexact tolerance coefficient");
  app.add_option("--xi-power", cfg.solver.xi_power, "inexact tolerance decay power");
  app.add_option("--max-inner", cfg.solver.max_inner, "Poisson solves per inner loop");
  app.add_option("--max-outer", cfg.solver.max_outer, "outer iteration cap");
  app.add_option("--eta-init", cfg.solver.eta_init, "source of the initial Poisson solve");
  app.add_option("--out", cfg.out_dir, "output directory");
  app.add_flag("--dump-mesh", cfg.dump_mesh, "write mesh.txt next to the reports");
  app.add_option("--jobs", cfg.jobs, "parallel (h) cells");
  app.add_option("--export-profile", cfg.profile_out, "write the disk reference profile (r v)");
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Monge-Ampere eigenvalue solver harness", "maeig"};
  app.set_help_flag("--help", "print this help");
  app.require_subcommand(1);

  ExperimentConfig cfg;
  std::string mode = "inexact";
  CLI::App* solve = app.add_subcommand("solve", "single solve: report.json, trace.csv, solution.csv");
  CLI::App* compare = app.add_subcommand("compare", "inexact vs exact on shared meshes: compare.csv");
  CLI::App* convergence = app.add_subcommand("convergence", "disk error study: convergence.csv");
  for (CLI::App* sub : {solve, compare, convergence}) add_common_options(*sub, cfg, mode);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (compare->parsed()) {
    cfg.command = Command::Compare;
    mode = "both";
  } else if (convergence->parsed()) {
    cfg.command = Command::Convergence;
  }
  cfg.mode = mode == "exact" ? ModeSelect::Exact
             : mode == "both" ? ModeSelect::Both
                              : ModeSelect::Inexact;

  try {
    validate(cfg);
  } catch (const UsageError& e) {
    std::cerr << "maeig: " << e.what() << '\n';
    return 2;
  }

  try {
    if (cfg.profile_out) write_profile(*cfg.profile_out, disk_reference());
    switch (cfg.command) {
      case Command::Solve:
        run_solve(cfg);
        return 0;
      case Command::Compare: {
        const auto rows = run_compare(cfg);
        const bool failed = std::any_of(rows.begin(), rows.end(), [](const CompareRow& r) { return r.failed(); });
        return failed ? 1 : 0;
      }
      case Command::Convergence:
        run_convergence(cfg);
        return 0;
    }
  } catch (const Error& e) {
    std::cerr << "maeig: solver failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "maeig: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace maeig::harness
