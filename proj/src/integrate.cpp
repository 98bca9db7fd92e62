#include "vme/integrate.hpp"

#include <algorithm>
#include <sstream>

#include "update_kernels.hpp"
#include "vme/error.hpp"

namespace vme {

namespace {
constexpr double kMinNewtonDamping = 1.0 / 1024.0;
}  // namespace

void validate(const IntegratorConfig& c) {
  std::ostringstream bad;
  if (!(c.p > 0.0 && c.p < 1.0)) bad << " p must lie in (0, 1);";
  if (!(c.cfl > 0.0)) bad << " cfl must be positive;";
  if (!(c.tol_c > 0.0)) bad << " tol_c must be positive;";
  if (!(c.tol_f > 0.0)) bad << " tol_f must be positive;";
  if (!(c.tol_newton > 0.0)) bad << " tol_newton must be positive;";
  if (c.max_split_iters < 1) bad << " max_split_iters must be >= 1;";
  if (c.max_newton_iters < 1) bad << " max_newton_iters must be >= 1;";
  if (!(c.denom_floor > 0.0)) bad << " denom_floor must be positive;";
  if (c.workers < 1) bad << " workers must be >= 1;";
  if (!bad.str().empty()) throw Error(ErrorCode::ValidationError, bad.str());
}

MultiscaleIntegrator::MultiscaleIntegrator(TwoScaleMesh mesh, MaterialField material,
                                           IntegratorConfig config)
    : mesh_(std::move(mesh)),
      material_(std::move(material)),
      config_(config),
      assembler_(mesh_, material_),
      ops_(assembler_.assemble_masses()) {
  validate(config_);
  substep_ = substep_constants(config_.p);
  const double requested = config_.cfl;
  if (clamp_cfl(config_.scheme, config_.p, config_.cfl)) {
    std::ostringstream msg;
    msg << "CFL " << requested << " exceeds the cap for " << to_string(config_.scheme)
        << "; clamped to " << config_.cfl;
    warnings_.push_back(msg.str());
  }
  if (config_.scheme == Scheme::EiSsm) {
    consistent_fine_.reserve(mesh_.n_es);
    for (const SubdomainMass& m : ops_.fine) consistent_fine_.emplace_back(m.consistent);
  }
  pool_ = std::make_unique<WorkerPool>(config_.workers);
}

MultiscaleState MultiscaleIntegrator::make_state(const Vector& d_c0, const Vector& v_c0) const {
  MultiscaleState s;
  s.d_c = d_c0;
  s.v_c = v_c0;
  for (int i : mesh_.coarse_constrained) s.d_c[i] = s.v_c[i] = 0.0;
  s.a_c = Vector::Zero(d_c0.size());
  for (int alpha = 0; alpha < mesh_.n_es; ++alpha) {
    const Vector zero = Vector::Zero(mesh_.fine_dof_count(alpha));
    s.d_f.push_back(zero);
    s.v_f.push_back(zero);
    s.a_f.push_back(zero);
  }
  return s;
}

double MultiscaleIntegrator::rel_change(const Vector& now, const Vector& before) const {
  if (now.size() == 0) return 0.0;
  const double diff = (now - before).lpNorm<Eigen::Infinity>();
  const double denom = before.lpNorm<Eigen::Infinity>();
  return denom < config_.denom_floor ? diff : diff / denom;
}

std::vector<TwoScaleAssembler::SubdomainForces> MultiscaleIntegrator::forces(
    const Vector& d_c, const std::vector<Vector>& d_f) {
  std::vector<TwoScaleAssembler::SubdomainForces> sf(static_cast<std::size_t>(mesh_.n_es));
  pool_->parallel_for(mesh_.n_es, [&](int alpha) {
    sf[alpha] = assembler_.subdomain_forces(alpha, assembler_.gather_patch(alpha, d_c), d_f[alpha]);
  });
  return sf;
}

Vector MultiscaleIntegrator::reduce_patch(
    const std::vector<TwoScaleAssembler::SubdomainForces>& sf) const {
  Vector f = Vector::Zero(mesh_.coarse_node_count());
  for (int alpha = 0; alpha < mesh_.n_es; ++alpha) {
    const auto& nodes = mesh_.gather_c_sub[alpha];
    for (std::size_t a = 0; a < nodes.size(); ++a)
      f[nodes[a]] += sf[alpha].patch[static_cast<Eigen::Index>(a)];
  }
  return f;
}

Vector MultiscaleIntegrator::coarse_acceleration(const Vector& f_c,
                                                 const std::vector<Vector>& a_f) const {
  Vector rhs = -f_c;
  if (!decoupled()) {
    for (int alpha = 0; alpha < mesh_.n_es; ++alpha) {
      const Vector coupling = ops_.fine[alpha].coupling_cf * a_f[alpha];
      const auto& nodes = mesh_.gather_c_sub[alpha];
      for (std::size_t a = 0; a < nodes.size(); ++a)
        rhs[nodes[a]] -= coupling[static_cast<Eigen::Index>(a)];
    }
  }
  return detail::lumped_solve(rhs, ops_.coarse_lumped, mesh_.coarse_constrained);
}

namespace {

[[noreturn]] void throw_split(int step, int worst, double e_f, double e_c, int iters) {
  std::ostringstream msg;
  msg << "operator split did not converge in " << iters << " iterations at step " << step
      << " (worst subdomain " << worst << ", fine change " << e_f << ", coarse change " << e_c << ")";
  throw Error(ErrorCode::SplitNonConvergence, msg.str());
}

}  // namespace

MultiscaleIntegrator::PhaseStats MultiscaleIntegrator::explicit_split(
    const Vector& d_c, const std::vector<Vector>& d_f, Vector& a_c, std::vector<Vector>& a_f,
    FineMass mass, int step) {
  const auto sf = forces(d_c, d_f);
  const Vector f_c = reduce_patch(sf);
  const int n_es = mesh_.n_es;
  std::vector<Vector> a_f_new(static_cast<std::size_t>(n_es));
  std::vector<double> e_f(static_cast<std::size_t>(n_es), 0.0);
  PhaseStats stats;
  for (int k = 1; k <= config_.max_split_iters; ++k) {
    const Vector a_c_new = coarse_acceleration(f_c, a_f);
    pool_->parallel_for(n_es, [&](int alpha) {
      if (config_.freeze_fine) {
        a_f_new[alpha] = Vector::Zero(a_f[alpha].size());
      } else {
        const SubdomainMass& m = ops_.fine[alpha];
        Vector rhs = -sf[alpha].fine;
        if (!config_.zero_coupling) rhs -= m.coupling_fc * assembler_.gather_patch(alpha, a_c_new);
        a_f_new[alpha] = mass == FineMass::Lumped ? Vector(rhs.cwiseQuotient(m.lumped))
                                                  : Vector(consistent_fine_[alpha].solve(rhs));
      }
      e_f[alpha] = rel_change(a_f_new[alpha], a_f[alpha]);
    });
    const double e_c = k > 1 ? rel_change(a_c_new, a_c) : 0.0;
    const auto worst = std::max_element(e_f.begin(), e_f.end());
    stats.iters = k;
    stats.worst = static_cast<int>(worst - e_f.begin());
    a_c = a_c_new;
    a_f.swap(a_f_new);
    if (decoupled() || (*worst < config_.tol_f && e_c < config_.tol_c)) return stats;
    if (k == config_.max_split_iters) throw_split(step, stats.worst, *worst, e_c, k);
  }
  return stats;
}

MultiscaleIntegrator::PhaseStats MultiscaleIntegrator::implicit_split(
    const Vector& d_c, std::vector<Vector>& d_f, Vector& a_c, std::vector<Vector>& a_f,
    const Recovery& rec, int step) {
  const int n_es = mesh_.n_es;
  std::vector<Vector> d_f_new(static_cast<std::size_t>(n_es));
  std::vector<Vector> a_f_new(static_cast<std::size_t>(n_es));
  std::vector<double> e_f(static_cast<std::size_t>(n_es), 0.0);
  std::vector<int> newton(static_cast<std::size_t>(n_es), 0);
  PhaseStats stats;
  for (int k = 1; k <= config_.max_split_iters; ++k) {
    const auto sf = forces(d_c, d_f);
    const Vector a_c_new = coarse_acceleration(reduce_patch(sf), a_f);
    pool_->parallel_for(n_es, [&](int alpha) {
      if (config_.freeze_fine) {
        d_f_new[alpha] = d_f[alpha];
        a_f_new[alpha] = Vector::Zero(a_f[alpha].size());
        e_f[alpha] = 0.0;
        return;
      }
      const SubdomainMass& m = ops_.fine[alpha];
      const Vector patch = assembler_.gather_patch(alpha, d_c);
      Vector inertia_c = Vector::Zero(m.consistent.rows());
      if (!config_.zero_coupling) inertia_c = m.coupling_fc * assembler_.gather_patch(alpha, a_c_new);
      Vector d = d_f[alpha];
      Vector f_int = sf[alpha].fine;
      int i = 0;
      for (;; ++i) {
        const Vector a = rec.accel(alpha, d);
        const Vector residual = m.consistent * a + f_int + inertia_c;
        if (residual.norm() < config_.tol_newton) {
          a_f_new[alpha] = a;
          break;
        }
        if (i == config_.max_newton_iters) {
          std::ostringstream msg;
          msg << "Newton did not converge in " << i << " iterations at step " << step
              << ", subdomain " << alpha << " (residual " << residual.norm() << ")";
          throw Error(ErrorCode::NewtonNonConvergence, msg.str());
        }
        const Matrix jac = rec.coef * m.consistent + assembler_.fine_tangent(alpha, patch, d);
        const Eigen::LLT<Matrix> llt(jac);
        if (llt.info() != Eigen::Success) {
          std::ostringstream msg;
          msg << "fine tangent factorization failed at step " << step << ", subdomain " << alpha;
          throw Error(ErrorCode::SingularTangent, msg.str());
        }
        // Halve the increment while the trial configuration folds an element.
        const Vector delta = llt.solve(-residual);
        for (double lambda = 1.0;; lambda *= 0.5) {
          try {
            f_int = assembler_.subdomain_forces(alpha, patch, d + lambda * delta).fine;
            d += lambda * delta;
            break;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::NonPositiveStretch || lambda < kMinNewtonDamping) throw;
          }
        }
      }
      newton[alpha] = std::max(newton[alpha], i);
      d_f_new[alpha] = d;
      e_f[alpha] = std::max(rel_change(a_f_new[alpha], a_f[alpha]), rel_change(d, d_f[alpha]));
    });
    const double e_c = k > 1 ? rel_change(a_c_new, a_c) : 0.0;
    const auto worst = std::max_element(e_f.begin(), e_f.end());
    stats.iters = k;
    stats.worst = static_cast<int>(worst - e_f.begin());
    a_c = a_c_new;
    a_f.swap(a_f_new);
    d_f.swap(d_f_new);
    if (decoupled() || (*worst < config_.tol_f && e_c < config_.tol_c)) break;
    if (k == config_.max_split_iters) throw_split(step, stats.worst, *worst, e_c, k);
  }
  stats.newton = *std::max_element(newton.begin(), newton.end());
  return stats;
}

int MultiscaleIntegrator::initial_accelerations(MultiscaleState& s) {
  for (auto& a : s.a_f) a.setZero();
  s.a_c.setZero();
  const FineMass mass = config_.scheme == Scheme::EiSsm ? FineMass::Consistent : FineMass::Lumped;
  return explicit_split(s.d_c, s.d_f, s.a_c, s.a_f, mass, 0).iters;
}

CriticalDt MultiscaleIntegrator::stable_dt(const MultiscaleState& s) const {
  CriticalDt dt = critical_dt_multiscale(assembler_, s.d_c, s.d_f, config_.scheme, config_.cfl);
  if (config_.freeze_fine) dt.governing = dt.dt_coarse;
  return dt;
}

StepRecord MultiscaleIntegrator::step(MultiscaleState& s) {
  try {
    const double dt = stable_dt(s).governing;
    check_dt_floor(dt, s.step + 1);
    switch (config_.scheme) {
      case Scheme::EeCdm: return step_ee_cdm(s, dt);
      case Scheme::EeSsm: return step_ee_ssm(s, dt);
      case Scheme::EiSsm: return step_ei_ssm(s, dt);
    }
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonPositiveStretch) throw;
    std::ostringstream msg;
    msg << e.detail() << " during step " << s.step + 1 << " from t=" << s.time;
    throw Error(e.code(), msg.str());
  }
  return {};
}

namespace {

StepRecord make_record(const MultiscaleState& s, double dt, int iters, int newton, int worst) {
  StepRecord r;
  r.step = s.step;
  r.time = s.time;
  r.dt = dt;
  r.split_iters = iters;
  r.newton_iters = newton;
  r.worst_subdomain = worst;
  return r;
}

}  // namespace

StepRecord MultiscaleIntegrator::step_ee_cdm(MultiscaleState& s, double dt) {
  const int n_es = mesh_.n_es;
  const int step = s.step + 1;
  const Vector d_c = detail::advance(s.d_c, s.v_c, s.a_c, dt, dt * dt / 2.0);
  std::vector<Vector> d_f(static_cast<std::size_t>(n_es));
  for (int alpha = 0; alpha < n_es; ++alpha)
    d_f[alpha] = detail::advance(s.d_f[alpha], s.v_f[alpha], s.a_f[alpha], dt, dt * dt / 2.0);

  Vector a_c = s.a_c;
  std::vector<Vector> a_f = s.a_f;
  const PhaseStats st = explicit_split(d_c, d_f, a_c, a_f, FineMass::Lumped, step);

  s.v_c = detail::trapezoid(s.v_c, s.a_c, a_c, dt / 2.0);
  for (int alpha = 0; alpha < n_es; ++alpha)
    s.v_f[alpha] = detail::trapezoid(s.v_f[alpha], s.a_f[alpha], a_f[alpha], dt / 2.0);
  s.d_c = d_c;
  s.a_c = a_c;
  s.d_f = std::move(d_f);
  s.a_f = std::move(a_f);
  s.time += dt;
  s.step = step;
  return make_record(s, dt, st.iters, 0, st.worst);
}

StepRecord MultiscaleIntegrator::step_ee_ssm(MultiscaleState& s, double dt) {
  const int n_es = mesh_.n_es;
  const int step = s.step + 1;
  const SubstepConstants k = substep_.with_dt(dt);

  // Sub-step to t + p dt.
  const Vector d_c_p = detail::advance(s.d_c, s.v_c, s.a_c, k.a0, k.a1);
  std::vector<Vector> d_f_p(static_cast<std::size_t>(n_es));
  for (int alpha = 0; alpha < n_es; ++alpha)
    d_f_p[alpha] = detail::advance(s.d_f[alpha], s.v_f[alpha], s.a_f[alpha], k.a0, k.a1);
  Vector a_c_p = s.a_c;
  std::vector<Vector> a_f_p = s.a_f;
  const PhaseStats st_p = explicit_split(d_c_p, d_f_p, a_c_p, a_f_p, FineMass::Lumped, step);
  const Vector v_c_p = detail::trapezoid(s.v_c, s.a_c, a_c_p, k.a2);
  std::vector<Vector> v_f_p(static_cast<std::size_t>(n_es));
  for (int alpha = 0; alpha < n_es; ++alpha)
    v_f_p[alpha] = detail::trapezoid(s.v_f[alpha], s.a_f[alpha], a_f_p[alpha], k.a2);

  // Full step.
  const Vector d_c = detail::advance(d_c_p, v_c_p, a_c_p, k.a3, k.a4);
  std::vector<Vector> d_f(static_cast<std::size_t>(n_es));
  for (int alpha = 0; alpha < n_es; ++alpha)
    d_f[alpha] = detail::advance(d_f_p[alpha], v_f_p[alpha], a_f_p[alpha], k.a3, k.a4);
  Vector a_c = a_c_p;
  std::vector<Vector> a_f = a_f_p;
  const PhaseStats st = explicit_split(d_c, d_f, a_c, a_f, FineMass::Lumped, step);

  s.v_c = detail::substep_full_velocity(v_c_p, s.a_c, a_c_p, a_c, k);
  for (int alpha = 0; alpha < n_es; ++alpha)
    s.v_f[alpha] = detail::substep_full_velocity(v_f_p[alpha], s.a_f[alpha], a_f_p[alpha], a_f[alpha], k);
  s.d_c = d_c;
  s.a_c = a_c;
  s.d_f = std::move(d_f);
  s.a_f = std::move(a_f);
  s.time += dt;
  s.step = step;
  const bool full_worse = st.iters >= st_p.iters;
  return make_record(s, dt, std::max(st.iters, st_p.iters), 0, full_worse ? st.worst : st_p.worst);
}

StepRecord MultiscaleIntegrator::step_ei_ssm(MultiscaleState& s, double dt) {
  const int n_es = mesh_.n_es;
  const int step = s.step + 1;
  const double p = config_.p;
  const SubstepConstants k = substep_.with_dt(dt);
  const ImplicitConstants c = implicit_constants(p, dt);
  const MultiscaleState& n = s;

  // Sub-step: explicit coarse predictor, implicit trapezoidal fine solve.
  const Vector d_c_p = detail::advance(s.d_c, s.v_c, s.a_c, k.a0, k.a1);
  std::vector<Vector> d_f_p = s.d_f;
  std::vector<Vector> a_f_p = s.a_f;
  Vector a_c_p = s.a_c;
  const double pdt = p * dt;
  Recovery sub;
  sub.coef = 4.0 / (pdt * pdt);
  sub.accel = [&](int alpha, const Vector& d) -> Vector {
    return (d - n.d_f[alpha] - n.v_f[alpha] * pdt) * (4.0 / (pdt * pdt)) - n.a_f[alpha];
  };
  const PhaseStats st_p = implicit_split(d_c_p, d_f_p, a_c_p, a_f_p, sub, step);
  const Vector v_c_p = detail::trapezoid(s.v_c, s.a_c, a_c_p, k.a2);
  std::vector<Vector> v_f_p(static_cast<std::size_t>(n_es));
  for (int alpha = 0; alpha < n_es; ++alpha)
    v_f_p[alpha] = (d_f_p[alpha] - s.d_f[alpha]) * (2.0 / pdt) - s.v_f[alpha];

  // Full step: explicit coarse, implicit three-point backward fine solve.
  const Vector d_c = detail::advance(d_c_p, v_c_p, a_c_p, k.a3, k.a4);
  std::vector<Vector> d_f = d_f_p;
  std::vector<Vector> a_f = a_f_p;
  Vector a_c = a_c_p;
  Recovery full;
  full.coef = c.c3 * c.c3;
  full.accel = [&](int alpha, const Vector& d) -> Vector {
    return c.c3 * (c.c3 * d + c.c2 * d_f_p[alpha] + c.c1 * n.d_f[alpha]) + c.c2 * v_f_p[alpha] +
           c.c1 * n.v_f[alpha];
  };
  const PhaseStats st = implicit_split(d_c, d_f, a_c, a_f, full, step);

  s.v_c = detail::substep_full_velocity(v_c_p, s.a_c, a_c_p, a_c, k);
  for (int alpha = 0; alpha < n_es; ++alpha)
    s.v_f[alpha] = c.c3 * d_f[alpha] + c.c2 * d_f_p[alpha] + c.c1 * s.d_f[alpha];
  s.d_c = d_c;
  s.a_c = a_c;
  s.d_f = std::move(d_f);
  s.a_f = std::move(a_f);
  s.time += dt;
  s.step = step;
  const bool full_worse = st.iters >= st_p.iters;
  return make_record(s, dt, std::max(st.iters, st_p.iters), std::max(st.newton, st_p.newton),
                     full_worse ? st.worst : st_p.worst);
}

double MultiscaleIntegrator::energy(const MultiscaleState& s) const {
  return total_energy(assembler_, s.d_c, s.v_c, s.d_f, s.v_f);
}

Snapshot MultiscaleIntegrator::snapshot(const MultiscaleState& s) const {
  const int n_fine = mesh_.n_fine_elements();
  const int nodes = 2 * n_fine + 1;
  const int per = mesh_.fine_per_coarse();
  Snapshot snap;
  snap.time = s.time;
  snap.x.resize(nodes);
  snap.u_coarse.resize(nodes);
  snap.u_fine.resize(nodes);
  snap.u_total.resize(nodes);
  constexpr std::array<double, 3> node_xi{-1.0, 0.0, 1.0};
  for (int j = 0; j < nodes; ++j) {
    const int g = std::min(j / 2, n_fine - 1);
    const int local = j - 2 * g;
    const int alpha = g / mesh_.n_ef;
    const int e = g % mesh_.n_ef;
    const LineElement fine = mesh_.fine_element(alpha, e);
    const int E = mesh_.fine_to_coarse[g];
    const LineElement coarse = mesh_.coarse_element(E);
    const double X = local == 0 ? fine.left : (local == 2 ? fine.right : fine.map(0.0));
    const double xi_c =
        per == 1 ? node_xi[local] : std::clamp(coarse.inverse_map(X), -1.0, 1.0);
    const ShapeEval sc = coarse.shape_eval(xi_c);
    const auto& conn = mesh_.coarse_connectivity[E];
    double uc = 0.0;
    for (int a = 0; a < sc.count; ++a) uc += sc.values[a] * s.d_c[conn[a]];
    const int dof = mesh_.fine_dof[alpha][2 * e + local];
    const double uf = dof >= 0 ? s.d_f[alpha][dof] : 0.0;
    snap.x[j] = X;
    snap.u_coarse[j] = uc;
    snap.u_fine[j] = uf;
    snap.u_total[j] = uc + uf;
  }
  snap.f_avg = element_stretch_profile(snap.x, snap.u_total);
  return snap;
}

RunResult MultiscaleIntegrator::run(MultiscaleState s, const RunOptions& options) {
  RunResult out;
  out.warnings = warnings_;
  out.initial_split_iters = initial_accelerations(s);
  detail::drive(
      s, options, out, [&](MultiscaleState& st) { return step(st); },
      [&](const MultiscaleState& st) { return snapshot(st); },
      [&](const MultiscaleState& st) { return energy(st); });
  return out;
}

}  // namespace vme
