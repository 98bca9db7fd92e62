#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vme/config.hpp"
#include "vme/run_result.hpp"
#include "vme/scenario.hpp"

namespace vme {

struct ErrorRow {
  double requested = 0.0;
  ErrorReport report;
};

struct ExperimentOutcome {
  std::optional<RunResult> vme;
  std::optional<RunResult> dns;
  std::vector<ErrorRow> errors;  // filled when both solvers ran
};

/// Builds the problem from the config and runs the requested solvers.
ExperimentOutcome run_experiment(const RunConfig& config);

/// The two-scale and reference problems a config describes.
MultiscaleIntegrator make_integrator(const RunConfig& config);
Vector initial_coarse_displacement(const RunConfig& config, const TwoScaleMesh& mesh);
DnsProblem make_dns_problem(const RunConfig& config);

/// Writes snapshots.csv (two-scale run, or the reference when it is the only
/// run), reference_snapshots.csv (when both ran), metrics.json and steps.log.
void write_outputs(const RunConfig& config, const ExperimentOutcome& outcome,
                   const std::filesystem::path& dir);

void write_snapshots_csv(const std::vector<Snapshot>& snapshots, const std::filesystem::path& path);
std::vector<Snapshot> read_snapshots_csv(const std::filesystem::path& path);

struct MatrixRow {
  std::string config_path;
  std::string label;
  bool ok = false;
  std::string failure;
  double contrast = 0.0;
  std::string scheme;
  int n_ef = 0;
  double cfl = 0.0;
  double wall_seconds = 0.0;
  double error = 0.0;  // at the last error time
  double error_time = 0.0;
};

/// Runs every config listed in the manifest (one path per line, relative to
/// the manifest; blank lines and # comments ignored). Failures are recorded
/// per row. Each run writes into out_dir/<config stem>/.
std::vector<MatrixRow> run_matrix(const std::filesystem::path& manifest,
                                  const std::filesystem::path& out_dir, int workers = 1);

std::string format_matrix_table(const std::vector<MatrixRow>& rows);
void write_matrix_csv(const std::vector<MatrixRow>& rows, const std::filesystem::path& path);

}  // namespace vme
