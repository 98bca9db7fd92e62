#include "vme/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "element_kernels.hpp"
#include "vme/error.hpp"

namespace vme {

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::EeCdm: return "EE-CDM";
    case Scheme::EeSsm: return "EE-SSM";
    case Scheme::EiSsm: return "EI-SSM";
  }
  return "unknown";
}

double element_max_frequency(double h, const NeoHookeanParams& material,
                             std::span<const double> stretches, int order) {
  const double kappa = order == 1 ? 2.0 : 2.0 * std::sqrt(6.0);
  double c = 0.0;
  for (double F : stretches) c = std::max(c, wave_speed_factor(material, Stretch{F}));
  return kappa / h * c;
}

double cfl_cap(Scheme scheme, double p) { return scheme == Scheme::EeCdm ? 1.0 : 1.0 / p; }

bool clamp_cfl(Scheme scheme, double p, double& cfl) {
  const double cap = cfl_cap(scheme, p);
  if (cfl <= cap) return false;
  cfl = cap;
  return true;
}

double critical_dt_dns(const SingleScaleMesh& mesh, const MaterialField& material, const Vector& d,
                       double cfl) {
  double dt = std::numeric_limits<double>::infinity();
  std::array<double, kQuadPoints> F{};
  for (int e = 0; e < mesh.n_el; ++e) {
    const LineElement el = mesh.element(e);
    const detail::Nodal3 u{d[2 * e], d[2 * e + 1], d[2 * e + 2]};
    for (int q = 0; q < kQuadPoints; ++q)
      F[q] = 1.0 + detail::gradient(el.shape_eval(kGaussPoints[q]), u);
    dt = std::min(dt, 2.0 / element_max_frequency(el.length(), material[e], F));
  }
  return cfl * dt;
}

CriticalDt critical_dt_multiscale(const TwoScaleAssembler& assembler, const Vector& d_c,
                                  const std::vector<Vector>& d_f, Scheme scheme, double cfl) {
  const TwoScaleMesh& mesh = assembler.mesh();
  const MaterialField& material = assembler.material();
  const int per = mesh.fine_per_coarse();
  double dt_f = std::numeric_limits<double>::infinity();
  double dt_c = dt_f;
  for (int alpha = 0; alpha < mesh.n_es; ++alpha) {
    const std::vector<double> F = assembler.stretches(alpha, assembler.gather_patch(alpha, d_c), d_f[alpha]);
    for (int E = 0; E < mesh.n_ecp; ++E) {
      double omega_c = 0.0;
      for (int j = 0; j < per; ++j) {
        const int e = E * per + j;
        const std::span<const double> pts(F.data() + e * kQuadPoints, kQuadPoints);
        const NeoHookeanParams& mat = material[alpha * mesh.n_ef + e];
        const double omega_f = element_max_frequency(mesh.fine_element(alpha, e).length(), mat, pts);
        dt_f = std::min(dt_f, 2.0 / omega_f);
        omega_c = std::max(omega_c, element_max_frequency(mesh.coarse_element(alpha * mesh.n_ecp + E).length(),
                                                          mat, pts, mesh.coarse_order));
      }
      dt_c = std::min(dt_c, 2.0 / omega_c);
    }
  }
  CriticalDt out;
  out.dt_fine = cfl * dt_f;
  out.dt_coarse = cfl * dt_c;
  out.cfl = cfl;
  out.scheme = scheme;
  out.governing = scheme == Scheme::EiSsm ? out.dt_coarse : out.dt_fine;
  return out;
}

void check_dt_floor(double dt, int step) {
  if (!(dt >= kDtFloor)) {
    std::ostringstream msg;
    msg << "time increment " << dt << " below floor " << kDtFloor << " at step " << step;
    throw Error(ErrorCode::DtFloor, msg.str());
  }
}

}  // namespace vme
