#include "vme/dns.hpp"

#include <sstream>

#include "element_kernels.hpp"
#include "update_kernels.hpp"
#include "vme/error.hpp"
#include "vme/stability.hpp"
#include "vme/time_constants.hpp"

namespace vme {

using detail::Nodal3;

namespace {

Nodal3 element_nodal(const Vector& u, int e) { return {u[2 * e], u[2 * e + 1], u[2 * e + 2]}; }

Scheme as_scheme(DnsIntegrator integrator) {
  return integrator == DnsIntegrator::CentralDifference ? Scheme::EeCdm : Scheme::EeSsm;
}

}  // namespace

DnsSolver::DnsSolver(DnsProblem problem) : problem_(std::move(problem)), cfl_(problem_.cfl) {
  const SingleScaleMesh& mesh = problem_.mesh;
  if (static_cast<int>(problem_.material.size()) != mesh.n_el)
    throw Error(ErrorCode::InvalidDiscretization, "material field must hold one entry per element");
  if (problem_.integrator == DnsIntegrator::SubStep) substep_constants(problem_.p);
  clamp_cfl(as_scheme(problem_.integrator), problem_.p, cfl_);
  fixed_ = mesh.constrained();
  mass_ = Vector::Zero(mesh.node_count());
  for (int e = 0; e < mesh.n_el; ++e) {
    const LineElement el = mesh.element(e);
    const double rho = problem_.material[e].density_ratio;
    std::array<std::array<double, 3>, 3> me{};
    for (int q = 0; q < kQuadPoints; ++q) {
      const ShapeEval s = el.shape_eval(kGaussPoints[q]);
      const double wj = kGaussWeights[q] * el.jacobian();
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) me[a][b] += detail::mass_term(wj, rho, s.values[a], s.values[b]);
    }
    for (int a = 0; a < 3; ++a) {
      double row = 0.0;
      for (int b = 0; b < 3; ++b) row += me[a][b];
      mass_[2 * e + a] += row;
    }
  }
}

Vector DnsSolver::internal_force(const Vector& d) const {
  const SingleScaleMesh& mesh = problem_.mesh;
  Vector f = Vector::Zero(mesh.node_count());
  for (int e = 0; e < mesh.n_el; ++e) {
    const LineElement el = mesh.element(e);
    const Nodal3 u = element_nodal(d, e);
    Nodal3 fe{};
    for (int q = 0; q < kQuadPoints; ++q) {
      const ShapeEval s = el.shape_eval(kGaussPoints[q]);
      const double F = 1.0 + detail::gradient(s, u);
      if (!(F > 0.0)) {
        std::ostringstream msg;
        msg << "stretch F = " << F << " at element " << e << ", quadrature point " << q;
        throw Error(ErrorCode::NonPositiveStretch, msg.str());
      }
      detail::add_force(fe, s, kGaussWeights[q] * el.jacobian(), stress(problem_.material[e], Stretch{F}));
    }
    for (int a = 0; a < 3; ++a) f[2 * e + a] += fe[a];
  }
  return f;
}

double DnsSolver::energy(const DnsState& s) const {
  const SingleScaleMesh& mesh = problem_.mesh;
  double total = 0.0;
  for (int e = 0; e < mesh.n_el; ++e) {
    const LineElement el = mesh.element(e);
    const NeoHookeanParams& mat = problem_.material[e];
    const Nodal3 u = element_nodal(s.d, e);
    const Nodal3 v = element_nodal(s.v, e);
    for (int q = 0; q < kQuadPoints; ++q) {
      const ShapeEval sh = el.shape_eval(kGaussPoints[q]);
      const double wj = kGaussWeights[q] * el.jacobian();
      const double vq = detail::value(sh, v);
      total += 0.5 * wj * mat.density_ratio * vq * vq;
      total += wj * vme::energy(mat, Stretch{1.0 + detail::gradient(sh, u)});
    }
  }
  return total;
}

DnsState DnsSolver::initial_state() const {
  DnsState s;
  s.d = problem_.d0;
  s.v = problem_.v0;
  for (int i : fixed_) s.d[i] = s.v[i] = 0.0;
  const Vector rhs = -internal_force(s.d);
  s.a = detail::lumped_solve(rhs, mass_, fixed_);
  return s;
}

double DnsSolver::stable_dt(const DnsState& s) const {
  return critical_dt_dns(problem_.mesh, problem_.material, s.d, cfl_);
}

StepRecord DnsSolver::step(DnsState& s) const {
  const double dt = stable_dt(s);
  check_dt_floor(dt, s.step + 1);
  if (problem_.integrator == DnsIntegrator::CentralDifference) {
    const Vector d = detail::advance(s.d, s.v, s.a, dt, dt * dt / 2.0);
    const Vector rhs = -internal_force(d);
    const Vector a = detail::lumped_solve(rhs, mass_, fixed_);
    s.v = detail::trapezoid(s.v, s.a, a, dt / 2.0);
    s.d = d;
    s.a = a;
  } else {
    const SubstepConstants k = substep_constants(problem_.p).with_dt(dt);
    const Vector d_p = detail::advance(s.d, s.v, s.a, k.a0, k.a1);
    const Vector rhs_p = -internal_force(d_p);
    const Vector a_p = detail::lumped_solve(rhs_p, mass_, fixed_);
    const Vector v_p = detail::trapezoid(s.v, s.a, a_p, k.a2);
    const Vector d = detail::advance(d_p, v_p, a_p, k.a3, k.a4);
    const Vector rhs = -internal_force(d);
    const Vector a = detail::lumped_solve(rhs, mass_, fixed_);
    s.v = detail::substep_full_velocity(v_p, s.a, a_p, a, k);
    s.d = d;
    s.a = a;
  }
  s.time += dt;
  ++s.step;
  StepRecord rec;
  rec.step = s.step;
  rec.time = s.time;
  rec.dt = dt;
  rec.split_iters = 1;
  return rec;
}

Snapshot DnsSolver::snapshot(const DnsState& s) const {
  Snapshot snap;
  snap.time = s.time;
  snap.x = problem_.mesh.nodes;
  snap.u_total.assign(s.d.data(), s.d.data() + s.d.size());
  snap.u_coarse = snap.u_total;
  snap.u_fine.assign(snap.u_total.size(), 0.0);
  snap.f_avg = element_stretch_profile(snap.x, snap.u_total);
  return snap;
}

RunResult dns_run(const DnsProblem& problem, const RunOptions& options) {
  const DnsSolver solver(problem);
  RunResult out;
  if (solver.cfl() != problem.cfl) {
    std::ostringstream msg;
    msg << "CFL " << problem.cfl << " exceeds the cap for this integrator; clamped to " << solver.cfl();
    out.warnings.push_back(msg.str());
  }
  DnsState state = solver.initial_state();
  detail::drive(
      state, options, out, [&](DnsState& s) { return solver.step(s); },
      [&](const DnsState& s) { return solver.snapshot(s); },
      [&](const DnsState& s) { return solver.energy(s); });
  return out;
}

}  // namespace vme
