#pragma once

// Vector updates shared by the single-scale and two-scale steppers. Both
// paths call these so that matched grids reproduce identical bits.

#include <algorithm>
#include <chrono>
#include <vector>

#include "vme/assembly.hpp"
#include "vme/run_result.hpp"
#include "vme/time_constants.hpp"

namespace vme::detail {

inline Vector advance(const Vector& d, const Vector& v, const Vector& a, double cv, double ca) {
  return d + cv * v + ca * a;
}

inline Vector trapezoid(const Vector& v, const Vector& a_old, const Vector& a_new, double half) {
  return v + half * (a_old + a_new);
}

inline Vector substep_full_velocity(const Vector& v_p, const Vector& a_n, const Vector& a_p,
                                    const Vector& a_new, const SubstepConstants& k) {
  return v_p + k.a5 * a_n + k.a6 * a_p + k.a7 * a_new;
}

inline Vector lumped_solve(const Vector& rhs, const Vector& mass, const std::vector<int>& fixed) {
  Vector a = rhs.cwiseQuotient(mass);
  for (int i : fixed) a[i] = 0.0;
  return a;
}

/// Advances a state to opt.end_time and records snapshots at the steps
/// nearest each requested time. `step(state)` must advance state.time and
/// return the step record.
template <class State, class StepFn, class SnapFn, class EnergyFn>
void drive(State& state, const RunOptions& opt, RunResult& out, StepFn&& step, SnapFn&& snapshot,
           EnergyFn&& energy) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<double> targets;
  for (double t : opt.snapshot_times)
    if (t > 0.0) targets.push_back(t);
  std::sort(targets.begin(), targets.end());

  out.snapshots.push_back(snapshot(state));
  if (opt.record_energy) out.energy.push_back(energy(state));
  std::size_t next = 0;
  while (state.time < opt.end_time) {
    State prev = state;
    out.steps.push_back(step(state));
    if (opt.record_energy) out.energy.push_back(energy(state));
    for (; next < targets.size() && targets[next] <= state.time; ++next) {
      const double target = targets[next];
      const State& pick = (target - prev.time <= state.time - target) ? prev : state;
      if (pick.time > out.snapshots.back().time) out.snapshots.push_back(snapshot(pick));
    }
  }
  out.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace vme::detail
