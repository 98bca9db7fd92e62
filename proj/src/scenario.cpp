#include "vme/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "vme/error.hpp"

namespace vme {

double InitialPulse::operator()(double X) const {
  const double t = std::tanh(X / width);
  return amplitude * (1.0 - t * t);
}

Vector build_initial_condition(const InitialPulse& pulse, const TwoScaleMesh& mesh) {
  Vector d(mesh.coarse_node_count());
  for (int i = 0; i < d.size(); ++i) d[i] = pulse(mesh.coarse_nodes[i]);
  for (int i : mesh.coarse_constrained) d[i] = 0.0;
  return d;
}

Vector build_initial_condition(const InitialPulse& pulse, const SingleScaleMesh& mesh) {
  Vector d(mesh.node_count());
  for (int i = 0; i < d.size(); ++i) d[i] = pulse(mesh.nodes[i]);
  for (int i : mesh.constrained()) d[i] = 0.0;
  return d;
}

MaterialField build_modulus_field(const Microstructure& micro, int n_cells, int elements_per_cell) {
  if (n_cells < 1 || elements_per_cell < 1)
    throw Error(ErrorCode::InvalidDiscretization, "cell and element counts must be positive");
  const double split = micro.fraction * elements_per_cell;
  if (std::abs(split - std::round(split)) > 1e-9 * elements_per_cell) {
    std::ostringstream msg;
    msg << "phase fraction " << micro.fraction << " times " << elements_per_cell
        << " elements per cell is not an integer";
    throw Error(ErrorCode::NonConformingPhase, msg.str());
  }
  const int soft = static_cast<int>(std::lround(split));
  MaterialField field;
  field.reserve(static_cast<std::size_t>(n_cells * elements_per_cell));
  for (int k = 0; k < n_cells; ++k)
    for (int e = 0; e < elements_per_cell; ++e)
      field.push_back({e < soft ? 1.0 : micro.contrast, 1.0});
  return field;
}

std::vector<double> total_displacement(const MultiscaleState& state, const TwoScaleMesh& mesh,
                                       std::span<const double> points) {
  std::vector<double> out;
  out.reserve(points.size());
  const int n_fine = mesh.n_fine_elements();
  for (double X : points) {
    const int g = std::clamp(static_cast<int>(std::floor((X + 0.5) * n_fine)), 0, n_fine - 1);
    const int alpha = g / mesh.n_ef;
    const int e = g % mesh.n_ef;
    const LineElement fine = mesh.fine_element(alpha, e);
    const int E = mesh.fine_to_coarse[g];
    const LineElement coarse = mesh.coarse_element(E);
    const ShapeEval sc = coarse.shape_eval(std::clamp(coarse.inverse_map(X), -1.0, 1.0));
    const ShapeEval sf = fine.shape_eval(std::clamp(fine.inverse_map(X), -1.0, 1.0));
    double u = 0.0;
    for (int a = 0; a < sc.count; ++a) u += sc.values[a] * state.d_c[mesh.coarse_connectivity[E][a]];
    const auto& conn = mesh.fine_connectivity[e];
    for (int a = 0; a < 3; ++a) {
      const int dof = mesh.fine_dof[alpha][conn[a]];
      if (dof >= 0) u += sf.values[a] * state.d_f[alpha][dof];
    }
    out.push_back(u);
  }
  return out;
}

std::size_t nearest_snapshot(const RunResult& run, double time, double tolerance) {
  if (run.snapshots.empty()) throw Error(ErrorCode::MissingSnapshot, "run has no snapshots");
  std::size_t best = 0;
  for (std::size_t i = 1; i < run.snapshots.size(); ++i)
    if (std::abs(run.snapshots[i].time - time) < std::abs(run.snapshots[best].time - time)) best = i;
  double tol = tolerance;
  if (tol < 0.0) {
    tol = 0.0;
    for (const StepRecord& r : run.steps) tol = std::max(tol, r.dt);
  }
  const double gap = std::abs(run.snapshots[best].time - time);
  if (gap > tol * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "no snapshot within " << tol << " of t=" << time << " (nearest t="
        << run.snapshots[best].time << ")";
    throw Error(ErrorCode::MissingSnapshot, msg.str());
  }
  return best;
}

ErrorReport relative_error_linf(const RunResult& run_a, const RunResult& run_b, double time,
                                double denom_floor, double tolerance) {
  const Snapshot& a = run_a.snapshots[nearest_snapshot(run_a, time, tolerance)];
  const Snapshot& b = run_b.snapshots[nearest_snapshot(run_b, time, tolerance)];
  std::vector<double> points = a.x;
  points.insert(points.end(), b.x.begin(), b.x.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  double diff = 0.0;
  double ref = 0.0;
  for (double X : points) {
    const double ua = interpolate_quadratic(a.x, a.u_total, X);
    const double ub = interpolate_quadratic(b.x, b.u_total, X);
    diff = std::max(diff, std::abs(ua - ub));
    ref = std::max(ref, std::abs(ub));
  }
  if (ref < denom_floor)
    throw Error(ErrorCode::ZeroReference, "reference field norm below floor");
  return {diff / ref, a.time, b.time};
}

double ReferenceScales::wave_speed() const { return std::sqrt(modulus / density); }
double ReferenceScales::to_nondimensional_time(double t) const { return t * wave_speed() / length; }
double ReferenceScales::to_nondimensional_length(double x) const { return x / length; }

}  // namespace vme
