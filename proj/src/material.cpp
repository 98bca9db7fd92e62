#include "vme/material.hpp"

#include <cmath>
#include <sstream>

#include "vme/error.hpp"

namespace vme {

namespace {

void require_positive(Stretch F) {
  if (!(F.value > 0.0)) {
    std::ostringstream msg;
    msg << "stretch F = " << F.value << " is not positive";
    throw Error(ErrorCode::NonPositiveStretch, msg.str());
  }
}

}  // namespace

double energy(const NeoHookeanParams& params, Stretch F) {
  require_positive(F);
  const double f = F.value;
  return 0.25 * params.modulus_ratio * (f * f - 1.0 - 2.0 * std::log(f));
}

double stress(const NeoHookeanParams& params, Stretch F) {
  require_positive(F);
  const double f = F.value;
  return 0.5 * params.modulus_ratio * (f - 1.0 / f);
}

double tangent(const NeoHookeanParams& params, Stretch F) {
  require_positive(F);
  const double f = F.value;
  return 0.5 * params.modulus_ratio * (1.0 + 1.0 / (f * f));
}

double wave_speed_factor(const NeoHookeanParams& params, Stretch F) {
  return std::sqrt(tangent(params, F) / params.density_ratio);
}

}  // namespace vme
