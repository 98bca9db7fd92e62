#pragma once

// Quadrature-point kernels shared by the two-scale assembler and the
// single-scale reference solver. Both paths must evaluate these in the
// same operation order so that coincident grids give identical bits.

#include <array>

#include "vme/material.hpp"
#include "vme/mesh.hpp"

namespace vme::detail {

using Nodal3 = std::array<double, 3>;

inline double gradient(const ShapeEval& s, const Nodal3& u) {
  double g = 0.0;
  for (int a = 0; a < s.count; ++a) g += s.gradients[a] * u[a];
  return g;
}

inline double value(const ShapeEval& s, const Nodal3& u) {
  double v = 0.0;
  for (int a = 0; a < s.count; ++a) v += s.values[a] * u[a];
  return v;
}

inline void add_force(Nodal3& fe, const ShapeEval& test, double weight_jac, double P) {
  for (int a = 0; a < test.count; ++a) fe[a] += weight_jac * test.gradients[a] * P;
}

inline double mass_term(double weight_jac, double rho, double Na, double Nb) {
  return weight_jac * rho * (Na * Nb);
}

inline double stiffness_term(double weight_jac, double D, double Ba, double Bb) {
  return weight_jac * D * (Ba * Bb);
}

}  // namespace vme::detail
