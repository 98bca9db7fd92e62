#include "vme/mesh.hpp"

#include <algorithm>
#include <sstream>

#include "vme/error.hpp"

namespace vme {

ShapeEval LineElement::shape_eval(double xi) const {
  ShapeEval s;
  s.count = order + 1;
  s.jacobian = jacobian();
  if (order == 1) {
    s.values = {0.5 * (1.0 - xi), 0.5 * (1.0 + xi), 0.0};
    s.parent_gradients = {-0.5, 0.5, 0.0};
  } else {
    s.values = {0.5 * xi * (xi - 1.0), 1.0 - xi * xi, 0.5 * xi * (xi + 1.0)};
    s.parent_gradients = {xi - 0.5, -2.0 * xi, xi + 0.5};
  }
  for (int i = 0; i < s.count; ++i) s.gradients[i] = s.parent_gradients[i] / s.jacobian;
  return s;
}

LineElement uniform_element(int n, int i, int order) {
  const double left = -0.5 + static_cast<double>(i) / static_cast<double>(n);
  const double right = -0.5 + static_cast<double>(i + 1) / static_cast<double>(n);
  return LineElement{left, right, order};
}

int TwoScaleMesh::fine_dof_count(int alpha) const {
  return static_cast<int>(std::count_if(fine_dof[alpha].begin(), fine_dof[alpha].end(),
                                        [](int d) { return d >= 0; }));
}

LineElement TwoScaleMesh::coarse_element(int global_coarse) const {
  return uniform_element(n_ec(), global_coarse, coarse_order);
}

LineElement TwoScaleMesh::fine_element(int alpha, int e) const {
  return uniform_element(n_fine_elements(), alpha * n_ef + e, 2);
}

TwoScaleMesh build_mesh(int n_es, int n_ecp, int n_ef, BoundaryConditions bc, int coarse_order) {
  std::ostringstream bad;
  if (n_es < 1) bad << " n_es must be >= 1;";
  if (n_ecp < 1) bad << " n_ecp must be >= 1;";
  if (n_ef < n_ecp) bad << " n_ef must be >= n_ecp;";
  if (n_ecp >= 1 && n_ef % n_ecp != 0) bad << " n_ef must be divisible by n_ecp;";
  if (coarse_order != 1 && coarse_order != 2) bad << " coarse_order must be 1 or 2;";
  if (!bad.str().empty()) throw Error(ErrorCode::InvalidDiscretization, bad.str());

  TwoScaleMesh m;
  m.n_es = n_es;
  m.n_ecp = n_ecp;
  m.n_ef = n_ef;
  m.coarse_order = coarse_order;
  m.bc = bc;

  const int n_ec = m.n_ec();
  const int order = coarse_order;
  m.coarse_nodes.resize(static_cast<std::size_t>(n_ec * order + 1));
  m.coarse_connectivity.resize(n_ec);
  for (int E = 0; E < n_ec; ++E) {
    const LineElement el = m.coarse_element(E);
    auto& conn = m.coarse_connectivity[E];
    for (int a = 0; a <= order; ++a) conn.push_back(E * order + a);
    m.coarse_nodes[conn.front()] = el.left;
    if (order == 2) m.coarse_nodes[conn[1]] = el.map(0.0);
    m.coarse_nodes[conn.back()] = el.right;
  }
  if (bc.left == BoundaryKind::Dirichlet) m.coarse_constrained.push_back(0);
  if (bc.right == BoundaryKind::Dirichlet) m.coarse_constrained.push_back(m.coarse_node_count() - 1);

  const int patch_nodes = m.patch_node_count();
  m.gather_c_sub.resize(n_es);
  for (int alpha = 0; alpha < n_es; ++alpha) {
    const int first = alpha * n_ecp * order;
    for (int a = 0; a < patch_nodes; ++a) m.gather_c_sub[alpha].push_back(first + a);
  }
  m.patch_connectivity.resize(n_ecp);
  for (int E = 0; E < n_ecp; ++E)
    for (int a = 0; a <= order; ++a) m.patch_connectivity[E].push_back(E * order + a);

  const int fine_nodes = m.fine_node_count();
  m.fine_connectivity.resize(n_ef);
  for (int e = 0; e < n_ef; ++e) m.fine_connectivity[e] = {2 * e, 2 * e + 1, 2 * e + 2};

  m.fine_nodes.resize(n_es);
  m.fine_constrained.resize(n_es);
  m.fine_dof.resize(n_es);
  for (int alpha = 0; alpha < n_es; ++alpha) {
    auto& x = m.fine_nodes[alpha];
    x.resize(fine_nodes);
    for (int e = 0; e < n_ef; ++e) {
      const LineElement el = m.fine_element(alpha, e);
      x[2 * e] = el.left;
      x[2 * e + 1] = el.map(0.0);
      x[2 * e + 2] = el.right;
    }
    // Fine fields vanish on every subdomain boundary except where it is
    // an exterior traction boundary.
    const bool left_free = alpha == 0 && bc.left == BoundaryKind::Traction;
    const bool right_free = alpha == n_es - 1 && bc.right == BoundaryKind::Traction;
    if (!left_free) m.fine_constrained[alpha].push_back(0);
    if (!right_free) m.fine_constrained[alpha].push_back(fine_nodes - 1);

    auto& dof = m.fine_dof[alpha];
    dof.assign(fine_nodes, -1);
    int next = 0;
    for (int j = 0; j < fine_nodes; ++j) {
      const auto& fixed = m.fine_constrained[alpha];
      if (std::find(fixed.begin(), fixed.end(), j) == fixed.end()) dof[j] = next++;
    }
  }

  const int per = m.fine_per_coarse();
  m.fine_to_coarse.resize(m.n_fine_elements());
  for (int alpha = 0; alpha < n_es; ++alpha)
    for (int e = 0; e < n_ef; ++e) m.fine_to_coarse[alpha * n_ef + e] = alpha * n_ecp + e / per;
  return m;
}

ParentPoint map_fine_to_coarse_parent(const TwoScaleMesh& mesh, int global_fine, double xi_f) {
  const int alpha = global_fine / mesh.n_ef;
  const int e = global_fine % mesh.n_ef;
  ParentPoint pt;
  pt.coarse_element = mesh.fine_to_coarse[global_fine];
  if (mesh.fine_per_coarse() == 1) {
    // Coincident elements: the composed map is the identity.
    pt.xi = xi_f;
    return pt;
  }
  const LineElement fine = mesh.fine_element(alpha, e);
  const LineElement coarse = mesh.coarse_element(pt.coarse_element);
  const double x = fine.map(xi_f);
  pt.xi = coarse.inverse_map(x);
  constexpr double slack = 1e-12;
  if (pt.xi < -1.0 - slack || pt.xi > 1.0 + slack) {
    std::ostringstream msg;
    msg << "fine element " << global_fine << " point X=" << x << " maps to xi_c=" << pt.xi
        << " in coarse element " << pt.coarse_element;
    throw Error(ErrorCode::PointOutsideCoarseElement, msg.str());
  }
  pt.xi = std::clamp(pt.xi, -1.0, 1.0);
  return pt;
}

std::vector<int> SingleScaleMesh::constrained() const {
  std::vector<int> fixed;
  if (bc.left == BoundaryKind::Dirichlet) fixed.push_back(0);
  if (bc.right == BoundaryKind::Dirichlet) fixed.push_back(node_count() - 1);
  return fixed;
}

SingleScaleMesh build_single_scale_mesh(int n_el, BoundaryConditions bc) {
  if (n_el < 1) throw Error(ErrorCode::InvalidDiscretization, "n_el must be >= 1");
  SingleScaleMesh m;
  m.n_el = n_el;
  m.bc = bc;
  m.nodes.resize(m.node_count());
  for (int e = 0; e < n_el; ++e) {
    const LineElement el = m.element(e);
    m.nodes[2 * e] = el.left;
    m.nodes[2 * e + 1] = el.map(0.0);
    m.nodes[2 * e + 2] = el.right;
  }
  return m;
}

}  // namespace vme
