#pragma once

#include <string>
#include <vector>

namespace vme {

/// Total field sampled on a uniform quadratic nodal grid over [-1/2, 1/2].
/// f_avg holds one element-averaged stretch per grid element.
struct Snapshot {
  double time = 0.0;
  std::vector<double> x;
  std::vector<double> u_total;
  std::vector<double> u_coarse;
  std::vector<double> u_fine;
  std::vector<double> f_avg;
};

struct StepRecord {
  int step = 0;
  double time = 0.0;
  double dt = 0.0;
  int split_iters = 0;    // largest over the phases of the step
  int newton_iters = 0;   // largest over subdomains, phases and split iterations
  int worst_subdomain = -1;
};

struct RunResult {
  std::vector<Snapshot> snapshots;
  std::vector<StepRecord> steps;
  std::vector<double> energy;  // per recorded state, starting at t = 0; empty unless requested
  std::vector<std::string> warnings;
  int initial_split_iters = 0;  // two-scale runs only
  double wall_seconds = 0.0;
};

/// Options shared by the two-scale and single-scale drivers.
struct RunOptions {
  double end_time = 0.0;
  std::vector<double> snapshot_times;  // t = 0 is always recorded
  bool record_energy = false;
};

/// Element-averaged stretch of a snapshot: Gauss-weighted mean of
/// 1 + du/dX over each quadratic grid element.
std::vector<double> element_stretch_profile(const RunResult& result, std::size_t index);
std::vector<double> element_stretch_profile(const std::vector<double>& x,
                                            const std::vector<double>& u);

/// Piecewise quadratic interpolant of nodal values on a uniform quadratic grid.
double interpolate_quadratic(const std::vector<double>& x, const std::vector<double>& u, double X);

}  // namespace vme
