// Command-line runner: `vme solve <config>` and `vme matrix <manifest>`.

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "vme/config.hpp"
#include "vme/error.hpp"
#include "vme/experiment.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

int solve(const std::string& config_path, int workers, const std::string& out_dir) {
  vme::RunConfig config;
  try {
    config = vme::load_config(config_path);
  } catch (const vme::Error& e) {
    std::cerr << config_path << ": " << e.what() << '\n';
    return kExitValidation;
  }
  if (workers > 0) config.integrator.workers = workers;
  if (!out_dir.empty()) config.output_dir = out_dir;
  try {
    const vme::ExperimentOutcome outcome = vme::run_experiment(config);
    vme::write_outputs(config, outcome, config.output_dir);
    for (const auto* run : {outcome.vme ? &*outcome.vme : nullptr, outcome.dns ? &*outcome.dns : nullptr})
      if (run)
        for (const auto& w : run->warnings) std::cerr << "warning: " << w << '\n';
    for (const vme::ErrorRow& row : outcome.errors)
      std::cout << "t=" << row.report.time_a << " (requested " << row.requested
                << ") relative L-inf error " << row.report.value << '\n';
    std::cout << "outputs written to " << config.output_dir << '\n';
  } catch (const std::exception& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return 0;
}

int matrix(const std::string& manifest, int workers, const std::string& out_dir) {
  const std::filesystem::path out = out_dir.empty() ? "matrix_out" : out_dir;
  std::vector<vme::MatrixRow> rows;
  try {
    rows = vme::run_matrix(manifest, out, workers > 0 ? workers : 1);
  } catch (const vme::Error& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  }
  std::filesystem::create_directories(out);
  vme::write_matrix_csv(rows, out / "summary.csv");
  std::cout << vme::format_matrix_table(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-scale wave propagation solver"};
  app.require_subcommand(1);

  std::string config_path, manifest, out_dir;
  int workers = 0;

  auto* solve_cmd = app.add_subcommand("solve", "Run one configuration");
  solve_cmd->add_option("config", config_path, "Configuration file")->required();
  solve_cmd->add_option("--workers", workers, "Worker threads for subdomain solves");
  solve_cmd->add_option("--out", out_dir, "Output directory (overrides the config)");

  auto* matrix_cmd = app.add_subcommand("matrix", "Run every configuration listed in a manifest");
  matrix_cmd->add_option("manifest", manifest, "Manifest file, one config path per line")->required();
  matrix_cmd->add_option("--workers", workers, "Worker threads per run");
  matrix_cmd->add_option("--out", out_dir, "Root output directory (default matrix_out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }
  if (*solve_cmd) return solve(config_path, workers, out_dir);
  return matrix(manifest, workers, out_dir);
}
