#include "vme/assembly.hpp"

#include <sstream>

#include "element_kernels.hpp"
#include "vme/error.hpp"

namespace vme {

using detail::Nodal3;

namespace {

double checked_stretch(double F, int alpha, int e, int q) {
  if (!(F > 0.0)) {
    std::ostringstream msg;
    msg << "stretch F = " << F << " at subdomain " << alpha << ", fine element " << e
        << ", quadrature point " << q;
    throw Error(ErrorCode::NonPositiveStretch, msg.str());
  }
  return F;
}

}  // namespace

TwoScaleAssembler::TwoScaleAssembler(const TwoScaleMesh& mesh, const MaterialField& material)
    : mesh_(&mesh), material_(&material) {
  if (static_cast<int>(material.size()) != mesh.n_fine_elements())
    throw Error(ErrorCode::InvalidDiscretization,
                "material field must hold one entry per fine element");
  table_.resize(mesh.n_es);
  for (int alpha = 0; alpha < mesh.n_es; ++alpha) {
    auto& pts = table_[alpha];
    pts.reserve(static_cast<std::size_t>(mesh.n_ef * kQuadPoints));
    for (int e = 0; e < mesh.n_ef; ++e) {
      const int global_fine = alpha * mesh.n_ef + e;
      const LineElement fine = mesh.fine_element(alpha, e);
      for (int q = 0; q < kQuadPoints; ++q) {
        const ParentPoint pt = map_fine_to_coarse_parent(mesh, global_fine, kGaussPoints[q]);
        const LineElement coarse = mesh.coarse_element(pt.coarse_element);
        QuadPoint qp;
        qp.fine_element = e;
        qp.patch_element = pt.coarse_element - alpha * mesh.n_ecp;
        qp.coarse = coarse.shape_eval(pt.xi);
        qp.fine = fine.shape_eval(kGaussPoints[q]);
        qp.weight_jac = kGaussWeights[q] * fine.jacobian();
        pts.push_back(qp);
      }
    }
  }
}

Vector TwoScaleAssembler::gather_patch(int alpha, const Vector& d_c) const {
  const auto& nodes = mesh_->gather_c_sub[alpha];
  Vector out(static_cast<Eigen::Index>(nodes.size()));
  for (std::size_t a = 0; a < nodes.size(); ++a) out[static_cast<Eigen::Index>(a)] = d_c[nodes[a]];
  return out;
}

namespace {

Nodal3 patch_nodal(const TwoScaleMesh& mesh, int patch_element, const Vector& d_c_patch) {
  Nodal3 u{};
  const auto& conn = mesh.patch_connectivity[patch_element];
  for (std::size_t a = 0; a < conn.size(); ++a) u[a] = d_c_patch[conn[a]];
  return u;
}

Nodal3 fine_nodal(const TwoScaleMesh& mesh, int alpha, int e, const Vector& d_f) {
  Nodal3 u{};
  const auto& dof = mesh.fine_dof[alpha];
  const auto& conn = mesh.fine_connectivity[e];
  for (int a = 0; a < 3; ++a) u[a] = dof[conn[a]] >= 0 ? d_f[dof[conn[a]]] : 0.0;
  return u;
}

}  // namespace

TwoScaleAssembler::SubdomainForces TwoScaleAssembler::subdomain_forces(int alpha,
                                                                       const Vector& d_c_patch,
                                                                       const Vector& d_f) const {
  const TwoScaleMesh& mesh = *mesh_;
  std::vector<Nodal3> coarse_elem(static_cast<std::size_t>(mesh.n_ecp), Nodal3{});
  SubdomainForces out;
  out.patch = Vector::Zero(mesh.patch_node_count());
  out.fine = Vector::Zero(mesh.fine_dof_count(alpha));
  const auto& dof = mesh.fine_dof[alpha];

  const auto& pts = table_[alpha];
  for (int e = 0; e < mesh.n_ef; ++e) {
    const NeoHookeanParams& mat = (*material_)[alpha * mesh.n_ef + e];
    const Nodal3 uf = fine_nodal(mesh, alpha, e, d_f);
    Nodal3 fine_elem{};
    for (int q = 0; q < kQuadPoints; ++q) {
      const QuadPoint& qp = pts[e * kQuadPoints + q];
      const Nodal3 uc = patch_nodal(mesh, qp.patch_element, d_c_patch);
      const double F = checked_stretch(
          (1.0 + detail::gradient(qp.coarse, uc)) + detail::gradient(qp.fine, uf), alpha, e, q);
      const double P = stress(mat, Stretch{F});
      detail::add_force(coarse_elem[qp.patch_element], qp.coarse, qp.weight_jac, P);
      detail::add_force(fine_elem, qp.fine, qp.weight_jac, P);
    }
    const auto& conn = mesh.fine_connectivity[e];
    for (int a = 0; a < 3; ++a)
      if (dof[conn[a]] >= 0) out.fine[dof[conn[a]]] += fine_elem[a];
  }
  for (int E = 0; E < mesh.n_ecp; ++E) {
    const auto& conn = mesh.patch_connectivity[E];
    for (std::size_t a = 0; a < conn.size(); ++a) out.patch[conn[a]] += coarse_elem[E][a];
  }
  return out;
}

Matrix TwoScaleAssembler::fine_tangent(int alpha, const Vector& d_c_patch, const Vector& d_f) const {
  const TwoScaleMesh& mesh = *mesh_;
  const int n = mesh.fine_dof_count(alpha);
  Matrix K = Matrix::Zero(n, n);
  const auto& dof = mesh.fine_dof[alpha];
  const auto& pts = table_[alpha];
  for (int e = 0; e < mesh.n_ef; ++e) {
    const NeoHookeanParams& mat = (*material_)[alpha * mesh.n_ef + e];
    const Nodal3 uf = fine_nodal(mesh, alpha, e, d_f);
    const auto& conn = mesh.fine_connectivity[e];
    for (int q = 0; q < kQuadPoints; ++q) {
      const QuadPoint& qp = pts[e * kQuadPoints + q];
      const Nodal3 uc = patch_nodal(mesh, qp.patch_element, d_c_patch);
      const double F = checked_stretch(
          (1.0 + detail::gradient(qp.coarse, uc)) + detail::gradient(qp.fine, uf), alpha, e, q);
      const double D = tangent(mat, Stretch{F});
      for (int a = 0; a < 3; ++a) {
        if (dof[conn[a]] < 0) continue;
        for (int b = 0; b < 3; ++b) {
          if (dof[conn[b]] < 0) continue;
          K(dof[conn[a]], dof[conn[b]]) += detail::stiffness_term(
              qp.weight_jac, D, qp.fine.gradients[a], qp.fine.gradients[b]);
        }
      }
    }
  }
  return K;
}

Matrix TwoScaleAssembler::patch_tangent(int alpha, const Vector& d_c_patch, const Vector& d_f) const {
  const TwoScaleMesh& mesh = *mesh_;
  const int n = mesh.patch_node_count();
  Matrix K = Matrix::Zero(n, n);
  const auto& pts = table_[alpha];
  for (int e = 0; e < mesh.n_ef; ++e) {
    const NeoHookeanParams& mat = (*material_)[alpha * mesh.n_ef + e];
    const Nodal3 uf = fine_nodal(mesh, alpha, e, d_f);
    for (int q = 0; q < kQuadPoints; ++q) {
      const QuadPoint& qp = pts[e * kQuadPoints + q];
      const Nodal3 uc = patch_nodal(mesh, qp.patch_element, d_c_patch);
      const double F = checked_stretch(
          (1.0 + detail::gradient(qp.coarse, uc)) + detail::gradient(qp.fine, uf), alpha, e, q);
      const double D = tangent(mat, Stretch{F});
      const auto& conn = mesh.patch_connectivity[qp.patch_element];
      for (int a = 0; a < qp.coarse.count; ++a)
        for (int b = 0; b < qp.coarse.count; ++b)
          K(conn[a], conn[b]) += detail::stiffness_term(qp.weight_jac, D, qp.coarse.gradients[a],
                                                        qp.coarse.gradients[b]);
    }
  }
  return K;
}

std::vector<double> TwoScaleAssembler::stretches(int alpha, const Vector& d_c_patch,
                                                 const Vector& d_f) const {
  const TwoScaleMesh& mesh = *mesh_;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(mesh.n_ef * kQuadPoints));
  const auto& pts = table_[alpha];
  for (int e = 0; e < mesh.n_ef; ++e) {
    const Nodal3 uf = fine_nodal(mesh, alpha, e, d_f);
    for (int q = 0; q < kQuadPoints; ++q) {
      const QuadPoint& qp = pts[e * kQuadPoints + q];
      const Nodal3 uc = patch_nodal(mesh, qp.patch_element, d_c_patch);
      out.push_back((1.0 + detail::gradient(qp.coarse, uc)) + detail::gradient(qp.fine, uf));
    }
  }
  return out;
}

double TwoScaleAssembler::subdomain_energy(int alpha, const Vector& d_c_patch,
                                           const Vector& v_c_patch, const Vector& d_f,
                                           const Vector& v_f) const {
  const TwoScaleMesh& mesh = *mesh_;
  const auto& pts = table_[alpha];
  double kinetic = 0.0;
  double strain = 0.0;
  for (int e = 0; e < mesh.n_ef; ++e) {
    const NeoHookeanParams& mat = (*material_)[alpha * mesh.n_ef + e];
    const Nodal3 uf = fine_nodal(mesh, alpha, e, d_f);
    const Nodal3 vf = fine_nodal(mesh, alpha, e, v_f);
    for (int q = 0; q < kQuadPoints; ++q) {
      const QuadPoint& qp = pts[e * kQuadPoints + q];
      const Nodal3 uc = patch_nodal(mesh, qp.patch_element, d_c_patch);
      const Nodal3 vc = patch_nodal(mesh, qp.patch_element, v_c_patch);
      const double F = checked_stretch(
          (1.0 + detail::gradient(qp.coarse, uc)) + detail::gradient(qp.fine, uf), alpha, e, q);
      const double v = detail::value(qp.coarse, vc) + detail::value(qp.fine, vf);
      kinetic += 0.5 * qp.weight_jac * mat.density_ratio * v * v;
      strain += qp.weight_jac * energy(mat, Stretch{F});
    }
  }
  return kinetic + strain;
}

AssembledOperators TwoScaleAssembler::assemble_masses() const {
  const TwoScaleMesh& mesh = *mesh_;
  AssembledOperators ops;
  const int nc = mesh.coarse_node_count();
  ops.coarse_lumped = Vector::Zero(nc);
  std::vector<Eigen::Triplet<double>> coarse_trips;

  for (int alpha = 0; alpha < mesh.n_es; ++alpha) {
    const int nf = mesh.fine_dof_count(alpha);
    const int np = mesh.patch_node_count();
    const auto& dof = mesh.fine_dof[alpha];
    SubdomainMass sm;
    sm.consistent = Matrix::Zero(nf, nf);
    sm.lumped = Vector::Zero(nf);
    sm.coupling_cf = Matrix::Zero(np, nf);
    sm.coupling_fc = Matrix::Zero(nf, np);

    using Elem3x3 = std::array<std::array<double, 3>, 3>;
    std::vector<Elem3x3> coarse_elem(static_cast<std::size_t>(mesh.n_ecp), Elem3x3{});
    const auto& pts = table_[alpha];
    for (int e = 0; e < mesh.n_ef; ++e) {
      const double rho = (*material_)[alpha * mesh.n_ef + e].density_ratio;
      const auto& fconn = mesh.fine_connectivity[e];
      Elem3x3 fine_elem{};
      for (int q = 0; q < kQuadPoints; ++q) {
        const QuadPoint& qp = pts[e * kQuadPoints + q];
        auto& ce = coarse_elem[qp.patch_element];
        for (int a = 0; a < qp.coarse.count; ++a)
          for (int b = 0; b < qp.coarse.count; ++b)
            ce[a][b] += detail::mass_term(qp.weight_jac, rho, qp.coarse.values[a], qp.coarse.values[b]);
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b)
            fine_elem[a][b] += detail::mass_term(qp.weight_jac, rho, qp.fine.values[a], qp.fine.values[b]);
        const auto& pconn = mesh.patch_connectivity[qp.patch_element];
        for (int a = 0; a < qp.coarse.count; ++a) {
          for (int b = 0; b < 3; ++b) {
            const int j = dof[fconn[b]];
            if (j < 0) continue;
            const double m =
                detail::mass_term(qp.weight_jac, rho, qp.coarse.values[a], qp.fine.values[b]);
            sm.coupling_cf(pconn[a], j) += m;
            sm.coupling_fc(j, pconn[a]) += m;
          }
        }
      }
      for (int a = 0; a < 3; ++a) {
        const int i = dof[fconn[a]];
        if (i < 0) continue;
        double row = 0.0;
        for (int b = 0; b < 3; ++b) row += fine_elem[a][b];
        sm.lumped[i] += row;
        for (int b = 0; b < 3; ++b) {
          const int j = dof[fconn[b]];
          if (j >= 0) sm.consistent(i, j) += fine_elem[a][b];
        }
      }
    }
    for (int E = 0; E < mesh.n_ecp; ++E) {
      const auto& gconn = mesh.coarse_connectivity[alpha * mesh.n_ecp + E];
      const int count = static_cast<int>(gconn.size());
      for (int a = 0; a < count; ++a) {
        double row = 0.0;
        for (int b = 0; b < count; ++b) {
          row += coarse_elem[E][a][b];
          coarse_trips.emplace_back(gconn[a], gconn[b], coarse_elem[E][a][b]);
        }
        ops.coarse_lumped[gconn[a]] += row;
      }
    }
    ops.fine.push_back(std::move(sm));
  }
  ops.coarse_consistent.resize(nc, nc);
  ops.coarse_consistent.setFromTriplets(coarse_trips.begin(), coarse_trips.end());
  return ops;
}

AssembledOperators assemble_masses(const TwoScaleMesh& mesh, const MaterialField& material) {
  return TwoScaleAssembler(mesh, material).assemble_masses();
}

Vector coarse_internal_force(const TwoScaleMesh& mesh, const MaterialField& material,
                             const Vector& d_c, const std::vector<Vector>& d_f) {
  const TwoScaleAssembler asmb(mesh, material);
  Vector f = Vector::Zero(mesh.coarse_node_count());
  for (int alpha = 0; alpha < mesh.n_es; ++alpha) {
    const auto forces = asmb.subdomain_forces(alpha, asmb.gather_patch(alpha, d_c), d_f[alpha]);
    const auto& nodes = mesh.gather_c_sub[alpha];
    for (std::size_t a = 0; a < nodes.size(); ++a) f[nodes[a]] += forces.patch[static_cast<Eigen::Index>(a)];
  }
  return f;
}

Vector fine_internal_force(const TwoScaleMesh& mesh, const MaterialField& material,
                           const Vector& d_c_sub, const Vector& d_f, int alpha) {
  return TwoScaleAssembler(mesh, material).subdomain_forces(alpha, d_c_sub, d_f).fine;
}

Matrix fine_tangent(const TwoScaleMesh& mesh, const MaterialField& material, const Vector& d_c_sub,
                    const Vector& d_f, int alpha) {
  return TwoScaleAssembler(mesh, material).fine_tangent(alpha, d_c_sub, d_f);
}

SparseMatrix coarse_tangent(const TwoScaleMesh& mesh, const MaterialField& material,
                            const Vector& d_c, const std::vector<Vector>& d_f) {
  const TwoScaleAssembler asmb(mesh, material);
  std::vector<Eigen::Triplet<double>> trips;
  for (int alpha = 0; alpha < mesh.n_es; ++alpha) {
    const Matrix Kp = asmb.patch_tangent(alpha, asmb.gather_patch(alpha, d_c), d_f[alpha]);
    const auto& nodes = mesh.gather_c_sub[alpha];
    for (Eigen::Index a = 0; a < Kp.rows(); ++a)
      for (Eigen::Index b = 0; b < Kp.cols(); ++b)
        if (Kp(a, b) != 0.0) trips.emplace_back(nodes[a], nodes[b], Kp(a, b));
  }
  SparseMatrix K(mesh.coarse_node_count(), mesh.coarse_node_count());
  K.setFromTriplets(trips.begin(), trips.end());
  return K;
}

double total_energy(const TwoScaleAssembler& assembler, const Vector& d_c, const Vector& v_c,
                    const std::vector<Vector>& d_f, const std::vector<Vector>& v_f) {
  double total = 0.0;
  for (int alpha = 0; alpha < assembler.mesh().n_es; ++alpha)
    total += assembler.subdomain_energy(alpha, assembler.gather_patch(alpha, d_c),
                                        assembler.gather_patch(alpha, v_c), d_f[alpha], v_f[alpha]);
  return total;
}

}  // namespace vme
