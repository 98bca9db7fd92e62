#pragma once

#include <vector>

namespace vme {

/// Compressible Neo-Hookean law reduced to 1-D with zero Poisson ratio
/// (lambda = 0, mu = E/2). Both fields are ratios to the reference phase.
struct NeoHookeanParams {
  double modulus_ratio = 1.0;
  double density_ratio = 1.0;
};

/// Stretch F = 1 + du/dX. Must be positive for any evaluation.
struct Stretch {
  double value = 1.0;
};

double energy(const NeoHookeanParams& params, Stretch F);
double stress(const NeoHookeanParams& params, Stretch F);
double tangent(const NeoHookeanParams& params, Stretch F);

/// sqrt(tangent / density): the local Lagrangian wave speed.
double wave_speed_factor(const NeoHookeanParams& params, Stretch F);

/// One parameter set per element (piecewise constant).
using MaterialField = std::vector<NeoHookeanParams>;

}  // namespace vme
