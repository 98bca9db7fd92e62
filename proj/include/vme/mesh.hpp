#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace vme {

/// 3-point Gauss-Legendre rule on [-1, 1], used for every element integral.
inline constexpr int kQuadPoints = 3;
inline const std::array<double, kQuadPoints> kGaussPoints{-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
inline constexpr std::array<double, kQuadPoints> kGaussWeights{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

struct ShapeEval {
  int count = 0;
  std::array<double, 3> values{};
  std::array<double, 3> parent_gradients{};
  std::array<double, 3> gradients{};  // d/dX
  double jacobian = 0.0;              // dX/dxi
};

/// Affine Lagrange line element of order 1 or 2. Nodes are ordered
/// left, (mid,) right.
struct LineElement {
  double left = 0.0;
  double right = 0.0;
  int order = 2;

  double length() const { return right - left; }
  double jacobian() const { return 0.5 * (right - left); }
  int node_count() const { return order + 1; }
  double map(double xi) const { return left + 0.5 * (xi + 1.0) * (right - left); }
  double inverse_map(double x) const { return 2.0 * (x - left) / (right - left) - 1.0; }

  ShapeEval shape_eval(double xi) const;
};

/// Bounds of element i of n uniform elements tiling [-1/2, 1/2]. Every
/// grid in the library is built from this so that coincident grids at
/// different scales share bit-identical coordinates.
LineElement uniform_element(int n, int i, int order);

enum class BoundaryKind { Dirichlet, Traction };

struct BoundaryConditions {
  BoundaryKind left = BoundaryKind::Dirichlet;
  BoundaryKind right = BoundaryKind::Dirichlet;
};

/// Coarse patch plus per-subdomain fine grid over [-1/2, 1/2].
///
/// Coarse nodes are numbered globally. Fine nodes are numbered locally
/// per subdomain; constrained fine nodes are eliminated, so fine vectors
/// carry only the free dofs given by `fine_dof`.
struct TwoScaleMesh {
  double domain_length = 1.0;
  int n_es = 0;
  int n_ecp = 0;
  int n_ef = 0;
  int coarse_order = 2;
  BoundaryConditions bc;

  std::vector<double> coarse_nodes;
  std::vector<std::vector<int>> coarse_connectivity;  // per global coarse element
  std::vector<int> coarse_constrained;                // global coarse nodes with prescribed values

  std::vector<std::vector<int>> gather_c_sub;     // per subdomain: global coarse nodes of its patch
  std::vector<std::vector<int>> patch_connectivity;  // per patch element: local patch node ids

  std::vector<std::vector<double>> fine_nodes;      // per subdomain, sorted
  std::vector<std::array<int, 3>> fine_connectivity;  // per fine element: local node ids
  std::vector<std::vector<int>> fine_constrained;   // per subdomain: local node ids fixed to zero
  std::vector<std::vector<int>> fine_dof;           // per subdomain: local node -> free dof or -1
  std::vector<int> fine_to_coarse;                  // global fine element -> global coarse element

  int n_ec() const { return n_es * n_ecp; }
  int n_fine_elements() const { return n_es * n_ef; }
  int fine_per_coarse() const { return n_ef / n_ecp; }
  int coarse_node_count() const { return static_cast<int>(coarse_nodes.size()); }
  int patch_node_count() const { return n_ecp * coarse_order + 1; }
  int fine_node_count() const { return 2 * n_ef + 1; }
  int fine_dof_count(int alpha) const;

  LineElement coarse_element(int global_coarse) const;
  LineElement fine_element(int alpha, int e) const;
};

TwoScaleMesh build_mesh(int n_es, int n_ecp, int n_ef, BoundaryConditions bc = {},
                        int coarse_order = 2);

struct ParentPoint {
  int coarse_element = 0;  // global coarse element id
  double xi = 0.0;
};

/// Two-scale isoparametric map: fine parent coordinate -> physical point ->
/// parent coordinate of the owning coarse element.
ParentPoint map_fine_to_coarse_parent(const TwoScaleMesh& mesh, int global_fine, double xi_f);

/// Single-scale grid used by the reference solver.
struct SingleScaleMesh {
  int n_el = 0;
  std::vector<double> nodes;
  BoundaryConditions bc;

  int node_count() const { return 2 * n_el + 1; }
  LineElement element(int e) const { return uniform_element(n_el, e, 2); }
  std::vector<int> constrained() const;
};

SingleScaleMesh build_single_scale_mesh(int n_el, BoundaryConditions bc = {});

}  // namespace vme
