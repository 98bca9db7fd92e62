#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vme/assembly.hpp"
#include "vme/mesh.hpp"
#include "vme/parallel.hpp"
#include "vme/run_result.hpp"
#include "vme/stability.hpp"
#include "vme/time_constants.hpp"

namespace vme {

struct IntegratorConfig {
  Scheme scheme = Scheme::EeSsm;
  double p = 0.54;
  double cfl = 1.0;
  double tol_c = 1e-3;
  double tol_f = 1e-3;
  double tol_newton = 1e-10;
  int max_split_iters = 1000;
  int max_newton_iters = 25;
  double denom_floor = 1e-12;
  /// Keep every fine field at zero: the coarse discretization alone. The
  /// coarse stability bound then governs for all schemes.
  bool freeze_fine = false;
  /// Drop the coupling mass terms (diagnostic).
  bool zero_coupling = false;
  int workers = 1;
};

/// Throws ValidationError listing every violated constraint.
void validate(const IntegratorConfig& config);

struct MultiscaleState {
  Vector d_c, v_c, a_c;
  std::vector<Vector> d_f, v_f, a_f;  // per subdomain, free fine dofs only
  double time = 0.0;
  int step = 0;
};

/// Operator-split integrator for the coupled coarse/fine system.
///
/// Each phase of a step iterates a coarse lumped-mass solve (with the
/// previous iterate's fine accelerations on the right-hand side) and
/// independent fine solves per subdomain (with the fresh coarse
/// acceleration) until the relative L-infinity changes drop below the
/// tolerances.
class MultiscaleIntegrator {
 public:
  MultiscaleIntegrator(TwoScaleMesh mesh, MaterialField material, IntegratorConfig config);
  MultiscaleIntegrator(const MultiscaleIntegrator&) = delete;
  MultiscaleIntegrator& operator=(const MultiscaleIntegrator&) = delete;

  const TwoScaleMesh& mesh() const { return mesh_; }
  const IntegratorConfig& config() const { return config_; }
  const AssembledOperators& operators() const { return ops_; }
  const TwoScaleAssembler& assembler() const { return assembler_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// State with the given coarse fields, zero fine fields and zero
  /// accelerations. Prescribed coarse dofs are set to zero.
  MultiscaleState make_state(const Vector& d_c0, const Vector& v_c0) const;

  /// Solves the coupled system for the accelerations at the current
  /// displacements. Returns the number of split iterations.
  int initial_accelerations(MultiscaleState& s);

  CriticalDt stable_dt(const MultiscaleState& s) const;

  /// One step with the scheme's stable increment.
  StepRecord step(MultiscaleState& s);
  StepRecord step_ee_cdm(MultiscaleState& s, double dt);
  StepRecord step_ee_ssm(MultiscaleState& s, double dt);
  StepRecord step_ei_ssm(MultiscaleState& s, double dt);

  double energy(const MultiscaleState& s) const;

  /// Coarse and fine parts evaluated at the nodes of the global fine grid.
  Snapshot snapshot(const MultiscaleState& s) const;

  /// Initial accelerations, then steps to options.end_time.
  RunResult run(MultiscaleState s, const RunOptions& options);

 private:
  struct PhaseStats {
    int iters = 0;
    int newton = 0;
    int worst = -1;
  };
  enum class FineMass { Lumped, Consistent };

  /// Accelerations at fixed displacements. a_c and a_f carry the initial
  /// guess in and the converged values out.
  PhaseStats explicit_split(const Vector& d_c, const std::vector<Vector>& d_f, Vector& a_c,
                            std::vector<Vector>& a_f, FineMass mass, int step);

  /// Affine fine acceleration a = recover(alpha, d) of an implicit phase,
  /// with d(a)/d(d) = coef * I.
  struct Recovery {
    double coef = 0.0;
    std::function<Vector(int, const Vector&)> accel;
  };
  PhaseStats implicit_split(const Vector& d_c, std::vector<Vector>& d_f, Vector& a_c,
                            std::vector<Vector>& a_f, const Recovery& rec, int step);

  bool decoupled() const { return config_.freeze_fine || config_.zero_coupling; }
  double rel_change(const Vector& now, const Vector& before) const;
  Vector coarse_acceleration(const Vector& f_c, const std::vector<Vector>& a_f) const;
  std::vector<TwoScaleAssembler::SubdomainForces> forces(const Vector& d_c,
                                                         const std::vector<Vector>& d_f);
  Vector reduce_patch(const std::vector<TwoScaleAssembler::SubdomainForces>& sf) const;

  TwoScaleMesh mesh_;
  MaterialField material_;
  IntegratorConfig config_;
  TwoScaleAssembler assembler_;
  AssembledOperators ops_;
  std::vector<Eigen::LLT<Matrix>> consistent_fine_;
  SubstepConstants substep_;
  std::vector<std::string> warnings_;
  std::unique_ptr<WorkerPool> pool_;
};

}  // namespace vme
