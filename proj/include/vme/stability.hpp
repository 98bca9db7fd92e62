#pragma once

#include <span>
#include <string>

#include "vme/assembly.hpp"
#include "vme/material.hpp"
#include "vme/mesh.hpp"

namespace vme {

enum class Scheme { EeCdm, EeSsm, EiSsm };

std::string to_string(Scheme scheme);

/// Hard lower bound on any time increment; smaller steps mean runaway
/// compression and raise DtFloor.
inline constexpr double kDtFloor = 1e-9;

/// Element-level bound on the largest natural frequency of a lumped-mass
/// element: kappa/h times the largest local wave speed over the given
/// quadrature stretches, with kappa = 2 sqrt(6) for quadratic elements and
/// 2 for linear ones.
double element_max_frequency(double h, const NeoHookeanParams& material,
                             std::span<const double> stretches, int order = 2);

struct CriticalDt {
  double dt_dns = 0.0;
  double dt_coarse = 0.0;
  double dt_fine = 0.0;
  double cfl = 0.0;
  Scheme scheme = Scheme::EeSsm;
  double governing = 0.0;  // the increment the scheme steps with
};

/// Largest admissible CFL: 1 for central differences, 1/p for sub-step schemes.
double cfl_cap(Scheme scheme, double p);

/// Clamps cfl to cfl_cap. Returns true when clamping happened.
bool clamp_cfl(Scheme scheme, double p, double& cfl);

/// CFL times the smallest 2/omega over the single-scale elements at state d.
double critical_dt_dns(const SingleScaleMesh& mesh, const MaterialField& material, const Vector& d,
                       double cfl);

/// Coarse and fine stable increments at the current two-scale state. The
/// fine bound governs the explicit-explicit schemes, the coarse bound governs
/// EI-SSM.
CriticalDt critical_dt_multiscale(const TwoScaleAssembler& assembler, const Vector& d_c,
                                  const std::vector<Vector>& d_f, Scheme scheme, double cfl);

/// Throws DtFloor when dt is below kDtFloor.
void check_dt_floor(double dt, int step);

}  // namespace vme
