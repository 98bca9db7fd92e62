#pragma once

#include "vme/assembly.hpp"
#include "vme/material.hpp"
#include "vme/mesh.hpp"
#include "vme/run_result.hpp"

namespace vme {

enum class DnsIntegrator { CentralDifference, SubStep };

/// Single-scale quadratic finite element problem resolving the full
/// microstructure; the reference the two-scale runs are measured against.
struct DnsProblem {
  SingleScaleMesh mesh;
  MaterialField material;  // one entry per element
  Vector d0;               // nodal initial displacement
  Vector v0;               // nodal initial velocity
  DnsIntegrator integrator = DnsIntegrator::SubStep;
  double cfl = 1.0;
  double p = 0.54;
};

struct DnsState {
  Vector d, v, a;
  double time = 0.0;
  int step = 0;
};

class DnsSolver {
 public:
  explicit DnsSolver(DnsProblem problem);

  const DnsProblem& problem() const { return problem_; }
  const Vector& lumped_mass() const { return mass_; }
  double cfl() const { return cfl_; }

  Vector internal_force(const Vector& d) const;
  double energy(const DnsState& s) const;
  DnsState initial_state() const;
  double stable_dt(const DnsState& s) const;
  StepRecord step(DnsState& s) const;
  Snapshot snapshot(const DnsState& s) const;

 private:
  DnsProblem problem_;
  Vector mass_;
  std::vector<int> fixed_;
  double cfl_;
};

/// Runs the reference solver, clamping CFL to the integrator's cap (a
/// warning is recorded when clamped).
RunResult dns_run(const DnsProblem& problem, const RunOptions& options);

}  // namespace vme
