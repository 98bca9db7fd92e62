#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "vme/material.hpp"
#include "vme/mesh.hpp"

namespace vme {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;

struct SubdomainMass {
  Matrix consistent;   // free fine dofs
  Vector lumped;       // row sums of the unconstrained consistent matrix, free rows only
  Matrix coupling_cf;  // patch nodes x free fine dofs
  Matrix coupling_fc;  // free fine dofs x patch nodes
};

/// State-independent mass operators of the coupled two-scale system.
struct AssembledOperators {
  SparseMatrix coarse_consistent;
  Vector coarse_lumped;
  std::vector<SubdomainMass> fine;
};

/// Precomputes two-scale quadrature tables (fine Gauss points with the
/// coarse shape functions evaluated through the two-scale map) and
/// evaluates forces and tangents over them.
///
/// All integrals run over the fine grid; material is indexed by global
/// fine element.
class TwoScaleAssembler {
 public:
  TwoScaleAssembler(const TwoScaleMesh& mesh, const MaterialField& material);

  const TwoScaleMesh& mesh() const { return *mesh_; }
  const MaterialField& material() const { return *material_; }

  Vector gather_patch(int alpha, const Vector& d_c) const;

  struct SubdomainForces {
    Vector patch;  // coarse internal force restricted to the patch
    Vector fine;   // fine internal force on free dofs
  };
  SubdomainForces subdomain_forces(int alpha, const Vector& d_c_patch, const Vector& d_f) const;

  Matrix fine_tangent(int alpha, const Vector& d_c_patch, const Vector& d_f) const;
  Matrix patch_tangent(int alpha, const Vector& d_c_patch, const Vector& d_f) const;

  /// Total stretch at every fine quadrature point of the subdomain,
  /// ordered by fine element then Gauss point.
  std::vector<double> stretches(int alpha, const Vector& d_c_patch, const Vector& d_f) const;

  /// Kinetic plus strain energy of the subdomain for the total field.
  double subdomain_energy(int alpha, const Vector& d_c_patch, const Vector& v_c_patch,
                          const Vector& d_f, const Vector& v_f) const;

  AssembledOperators assemble_masses() const;

 private:
  struct QuadPoint {
    int fine_element;   // local to the subdomain
    int patch_element;  // local coarse element within the patch
    ShapeEval coarse;
    ShapeEval fine;
    double weight_jac;
  };

  const TwoScaleMesh* mesh_;
  const MaterialField* material_;
  std::vector<std::vector<QuadPoint>> table_;
};

AssembledOperators assemble_masses(const TwoScaleMesh& mesh, const MaterialField& material);

Vector coarse_internal_force(const TwoScaleMesh& mesh, const MaterialField& material,
                             const Vector& d_c, const std::vector<Vector>& d_f);

Vector fine_internal_force(const TwoScaleMesh& mesh, const MaterialField& material,
                           const Vector& d_c_sub, const Vector& d_f, int alpha);

Matrix fine_tangent(const TwoScaleMesh& mesh, const MaterialField& material,
                    const Vector& d_c_sub, const Vector& d_f, int alpha);

SparseMatrix coarse_tangent(const TwoScaleMesh& mesh, const MaterialField& material,
                            const Vector& d_c, const std::vector<Vector>& d_f);

/// Quadrature-evaluated kinetic + strain energy of the total field.
double total_energy(const TwoScaleAssembler& assembler, const Vector& d_c, const Vector& v_c,
                    const std::vector<Vector>& d_f, const std::vector<Vector>& v_f);

}  // namespace vme
