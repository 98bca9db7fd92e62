#include "vme/run_result.hpp"

#include <algorithm>
#include <cmath>

#include "element_kernels.hpp"
#include "vme/error.hpp"
#include "vme/mesh.hpp"

namespace vme {

namespace {

int grid_elements(const std::vector<double>& x) {
  if (x.size() < 3 || x.size() % 2 == 0)
    throw Error(ErrorCode::InvalidDiscretization, "snapshot grid is not a quadratic nodal grid");
  return static_cast<int>(x.size() - 1) / 2;
}

}  // namespace

std::vector<double> element_stretch_profile(const std::vector<double>& x,
                                            const std::vector<double>& u) {
  const int n = grid_elements(x);
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int e = 0; e < n; ++e) {
    const LineElement el{x[2 * e], x[2 * e + 2], 2};
    const detail::Nodal3 ue{u[2 * e], u[2 * e + 1], u[2 * e + 2]};
    double sum = 0.0;
    for (int q = 0; q < kQuadPoints; ++q)
      sum += kGaussWeights[q] * (1.0 + detail::gradient(el.shape_eval(kGaussPoints[q]), ue));
    out[e] = sum / 2.0;
  }
  return out;
}

std::vector<double> element_stretch_profile(const RunResult& result, std::size_t index) {
  const Snapshot& s = result.snapshots.at(index);
  return element_stretch_profile(s.x, s.u_total);
}

double interpolate_quadratic(const std::vector<double>& x, const std::vector<double>& u, double X) {
  const int n = grid_elements(x);
  const double pos = (X - x.front()) / (x.back() - x.front()) * n;
  const int e = std::clamp(static_cast<int>(std::floor(pos)), 0, n - 1);
  const LineElement el{x[2 * e], x[2 * e + 2], 2};
  const ShapeEval s = el.shape_eval(std::clamp(el.inverse_map(X), -1.0, 1.0));
  return detail::value(s, {u[2 * e], u[2 * e + 1], u[2 * e + 2]});
}

}  // namespace vme
