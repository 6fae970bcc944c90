#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "maeig/eigensolver.hpp"
#include "maeig/oracle.hpp"

namespace maeig::harness {

enum class Command { Solve, Compare, Convergence };
enum class ModeSelect { Inexact, Exact, Both };

/// Bad flags or an inconsistent configuration (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExperimentConfig {
  Command command = Command::Solve;
  std::string domain = "disk";
  std::vector<double> h;
  ModeSelect mode = ModeSelect::Inexact;
  std::filesystem::path out_dir = ".";
  std::uint64_t seed = 0;
  // Solver defaults; domain, h, mode and seed are filled per run.
  SolverConfig solver;
  bool dump_mesh = false;
  int jobs = 1;
  // Writes the normalized disk profile as "r v" lines when set.
  std::optional<std::filesystem::path> profile_out;
};

/// Throws UsageError.
void validate(const ExperimentConfig& cfg);

/// 12 significant digits, "nan"/"inf" spelled out.
std::string format_real(double value);

/// Solver config for one (h, mode) cell.
SolverConfig cell_config(const ExperimentConfig& cfg, double h, SolverMode mode);

nlohmann::json report_json(const SolverConfig& solver, std::string_view domain,
                           const EigenResult& result);

struct CompareRow {
  std::string algorithm;  // "iAKI-FP", "AKI", or "FAILED:<algorithm>"
  double h = 0.0;
  int iter = 0;
  double eta1 = 0.0;
  double lambda_h = 0.0;
  double min_u = 0.0;
  double time_s = 0.0;
  long poisson = 0;
  std::string error;  // set on failure rows
  bool failed() const { return !error.empty(); }
};

struct ConvergenceRow {
  double h = 0.0;
  ErrorNorms errors;
  std::optional<double> l2_rate;
  std::optional<double> h1_rate;
};

/// Writes report.json, trace.csv, solution.csv (and mesh.txt with dump_mesh)
/// into out_dir. Solver errors propagate.
EigenResult run_solve(const ExperimentConfig& cfg);

/// Writes compare.csv. Failure rows are included in the result; the remaining
/// cells still run.
std::vector<CompareRow> run_compare(const ExperimentConfig& cfg);

/// Writes convergence.csv (nodal error norms) and convergence_detail.csv
/// (both norm families).
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg);

void write_profile(const std::filesystem::path& path, const RadialSolution& sol);

/// Parses argv and dispatches. Returns the process exit code:
/// 0 success, 1 solver failure, 2 usage error.
int run_cli(int argc, const char* const* argv);

}  // namespace maeig::harness
