#pragma once

#include <span>
#include <vector>

#include "vme/assembly.hpp"
#include "vme/integrate.hpp"
#include "vme/material.hpp"
#include "vme/mesh.hpp"
#include "vme/run_result.hpp"

namespace vme {

/// u(X, 0) = a (1 - tanh^2(X / c)), zero initial velocity.
struct InitialPulse {
  double amplitude = 0.04;
  double width = 0.05;

  double operator()(double X) const;
};

/// Periodic two-phase layering: in each cell of size l the first fraction
/// beta has modulus 1 and the remainder has modulus C. Density is uniform.
struct Microstructure {
  double contrast = 1.0;
  double fraction = 0.5;
};

/// Pulse sampled at the coarse nodes; prescribed nodes are left at zero.
Vector build_initial_condition(const InitialPulse& pulse, const TwoScaleMesh& mesh);
Vector build_initial_condition(const InitialPulse& pulse, const SingleScaleMesh& mesh);

/// Per-element parameters for n_cells cells of elements_per_cell uniform
/// elements each. Throws NonConformingPhase unless the phase boundary falls
/// on an element boundary.
MaterialField build_modulus_field(const Microstructure& micro, int n_cells, int elements_per_cell);

/// Total displacement u^c + u^f of a two-scale state at arbitrary points
/// of [-1/2, 1/2].
std::vector<double> total_displacement(const MultiscaleState& state, const TwoScaleMesh& mesh,
                                       std::span<const double> points);

struct ErrorReport {
  double value = 0.0;
  double time_a = 0.0;  // snapshot times actually compared
  double time_b = 0.0;
};

/// ||u_a - u_b||_inf / ||u_b||_inf at the snapshots nearest `time`. Both
/// fields are sampled at the union of the two nodal grids through their own
/// interpolants. Throws MissingSnapshot when a run has no snapshot within
/// `tolerance` of the time (default: one step of that run) and
/// ZeroReference when ||u_b|| is below denom_floor.
ErrorReport relative_error_linf(const RunResult& run_a, const RunResult& run_b, double time,
                                double denom_floor = 1e-12, double tolerance = -1.0);

/// Index of the snapshot nearest `time`, or throws MissingSnapshot when it
/// is farther than `tolerance` (negative: one step of the run).
std::size_t nearest_snapshot(const RunResult& run, double time, double tolerance = -1.0);

/// Reference scales of the dimensional problem: domain length L, reference
/// modulus and density. Nondimensional time is t v / L with v = sqrt(E/rho).
struct ReferenceScales {
  double length = 1.0;
  double modulus = 1.0;
  double density = 1.0;

  double wave_speed() const;
  double to_nondimensional_time(double t) const;
  double to_nondimensional_length(double x) const;
};

}  // namespace vme
