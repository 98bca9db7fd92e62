#include "vme/time_constants.hpp"

#include <string>

#include "vme/error.hpp"

namespace vme {

namespace {

void check_ratio(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw Error(ErrorCode::InvalidSubstepRatio, "sub-step ratio p=" + std::to_string(p) + " outside (0, 1)");
}

}  // namespace

SubstepConstants substep_constants(double p) {
  check_ratio(p);
  SubstepConstants k;
  k.p = p;
  k.q1 = (1.0 - 2.0 * p) / (2.0 * p * (1.0 - p));
  k.q2 = 0.5 - p * k.q1;
  k.q0 = -k.q1 - k.q2 + 0.5;
  return k;
}

SubstepConstants SubstepConstants::with_dt(double dt) const {
  SubstepConstants k = *this;
  k.a0 = p * dt;
  k.a1 = 0.5 * (p * dt) * (p * dt);
  k.a2 = k.a0 / 2.0;
  k.a3 = (1.0 - p) * dt;
  k.a4 = 0.5 * k.a3 * k.a3;
  k.a5 = q0 * k.a3;
  k.a6 = (0.5 + q1) * k.a3;
  k.a7 = q2 * k.a3;
  return k;
}

ImplicitConstants implicit_constants(double p, double dt) {
  check_ratio(p);
  ImplicitConstants c;
  c.c1 = (1.0 - p) / (p * dt);
  c.c2 = -1.0 / ((1.0 - p) * p * dt);
  c.c3 = (2.0 - p) / ((1.0 - p) * dt);
  return c;
}

}  // namespace vme
