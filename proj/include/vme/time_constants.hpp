#pragma once

namespace vme {

/// Constants of the explicit sub-step scheme. The a-constants depend on the
/// increment; `with_dt` fills them in.
struct SubstepConstants {
  double p = 0.0;
  double q0 = 0.0, q1 = 0.0, q2 = 0.0;
  double a0 = 0.0, a1 = 0.0, a2 = 0.0, a3 = 0.0, a4 = 0.0, a5 = 0.0, a6 = 0.0, a7 = 0.0;

  SubstepConstants with_dt(double dt) const;
};

/// Throws InvalidSubstepRatio unless 0 < p < 1.
SubstepConstants substep_constants(double p);

/// Velocity/acceleration recovery constants of the implicit composite
/// full step.
struct ImplicitConstants {
  double c1 = 0.0, c2 = 0.0, c3 = 0.0;
};

ImplicitConstants implicit_constants(double p, double dt);

}  // namespace vme
