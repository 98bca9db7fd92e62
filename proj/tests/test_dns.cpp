#include <doctest.h>

#include <cmath>

#include "vme/dns.hpp"
#include "vme/error.hpp"
#include "vme/scenario.hpp"

using namespace vme;

namespace {

DnsProblem pulse_problem(int n_el, double amplitude, DnsIntegrator integrator, double cfl) {
  DnsProblem p;
  p.mesh = build_single_scale_mesh(n_el);
  p.material = MaterialField(n_el, NeoHookeanParams{1.0, 1.0});
  p.d0 = build_initial_condition(InitialPulse{amplitude, 0.05}, p.mesh);
  p.v0 = Vector::Zero(p.mesh.node_count());
  p.integrator = integrator;
  p.cfl = cfl;
  return p;
}

double dalembert(double amplitude, double X, double t) {
  auto f = [&](double y) {
    const double th = std::tanh(y / 0.05);
    return amplitude * (1.0 - th * th);
  };
  return 0.5 * (f(X - t) + f(X + t));
}

}  // namespace

TEST_CASE("lumped mass carries the domain mass") {
  const DnsSolver dns(pulse_problem(10, 0.0, DnsIntegrator::SubStep, 1.0));
  CHECK(dns.lumped_mass().sum() == doctest::Approx(1.0).epsilon(1e-14));
  // Quadratic element row sums: h/6, 2h/3, h/6.
  CHECK(dns.lumped_mass()[0] == doctest::Approx(0.1 / 6.0));
  CHECK(dns.lumped_mass()[1] == doctest::Approx(0.2 / 3.0));
  CHECK(dns.lumped_mass()[2] == doctest::Approx(0.1 / 3.0));
}

TEST_CASE("material field must match the element count") {
  DnsProblem p = pulse_problem(10, 0.0, DnsIntegrator::SubStep, 1.0);
  p.material.pop_back();
  CHECK_THROWS_AS(DnsSolver{p}, Error);
}

TEST_CASE("zero initial condition stays at rest") {
  for (DnsIntegrator integ : {DnsIntegrator::CentralDifference, DnsIntegrator::SubStep}) {
    const RunResult r = dns_run(pulse_problem(40, 0.0, integ, 1.0), {0.1, {0.05, 0.1}, false});
    REQUIRE(r.snapshots.size() == 3);
    for (const Snapshot& s : r.snapshots)
      for (double u : s.u_total) CHECK(u == 0.0);
  }
}

TEST_CASE("CFL above the cap is clamped with a warning") {
  const RunResult r = dns_run(pulse_problem(20, 0.0, DnsIntegrator::CentralDifference, 1.2), {0.01, {}, false});
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("clamped to 1") != std::string::npos);
  const RunResult ok = dns_run(pulse_problem(20, 0.0, DnsIntegrator::SubStep, 1.2), {0.01, {}, false});
  CHECK(ok.warnings.empty());
}

TEST_CASE("stretch profile of simple fields") {
  const SingleScaleMesh mesh = build_single_scale_mesh(8);
  const std::vector<double> zero(mesh.node_count(), 0.0);
  for (double F : element_stretch_profile(mesh.nodes, zero)) CHECK(F == 1.0);
  std::vector<double> linear;
  for (double X : mesh.nodes) linear.push_back(0.03 * X);
  const std::vector<double> F = element_stretch_profile(mesh.nodes, linear);
  CHECK(F.size() == 8);
  for (double f : F) CHECK(f == doctest::Approx(1.03).epsilon(1e-14));
}

TEST_CASE("linear pulse splits into two translating halves") {
  const double a = 1e-5;
  for (DnsIntegrator integ : {DnsIntegrator::CentralDifference, DnsIntegrator::SubStep}) {
    const RunResult r = dns_run(pulse_problem(800, a, integ, 1.0), {0.2, {0.2}, false});
    const Snapshot& s = r.snapshots.back();
    CHECK(std::abs(s.time - 0.2) <= r.steps.back().dt);
    double err = 0.0;
    for (std::size_t i = 0; i < s.x.size(); ++i)
      err = std::max(err, std::abs(s.u_total[i] - dalembert(a, s.x[i], s.time)));
    CHECK(err < 1e-4 * a);
  }
}

TEST_CASE("finite amplitude pulse: each half carries a tension/compression pair") {
  const RunResult r = dns_run(pulse_problem(800, 0.04, DnsIntegrator::SubStep, 1.0), {0.149, {0.149}, false});
  const Snapshot& s = r.snapshots.back();
  auto stretch_at = [&](double X) { return s.f_avg.at(static_cast<std::size_t>((X + 0.5) * 800.0)); };
  const double front = s.time;
  // The right-moving half leads with compression, the left-moving half
  // with tension.
  CHECK(stretch_at(front - 0.03) > 1.0);
  CHECK(stretch_at(front + 0.03) < 1.0);
  CHECK(stretch_at(-front - 0.03) > 1.0);
  CHECK(stretch_at(-front + 0.03) < 1.0);

  // Compression is stiffer than tension: the left half's compressive tail
  // runs into its crest and flattens it.
  double left = 0.0, right = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    double& peak = s.x[i] < 0.0 ? left : right;
    peak = std::max(peak, s.u_total[i]);
  }
  CHECK(left < right);
  CHECK(right < 0.02 * 1.05);
}

TEST_CASE("refining the reference mesh") {
  const RunOptions opts{0.3, {0.3}, false};
  SUBCASE("linear pulse is converged at 800 elements") {
    const RunResult a = dns_run(pulse_problem(800, 1e-5, DnsIntegrator::SubStep, 1.0), opts);
    const RunResult b = dns_run(pulse_problem(1600, 1e-5, DnsIntegrator::SubStep, 1.0), opts);
    CHECK(relative_error_linf(a, b, 0.3).value < 1e-3);
  }
  SUBCASE("finite amplitude pulse converges once fronts steepen") {
    // The compressive half of each wave steepens into a front near t = 0.1,
    // so successive refinements close in at first order rather than agreeing
    // to 1e-3 already at 800 elements.
    const RunResult a = dns_run(pulse_problem(800, 0.04, DnsIntegrator::SubStep, 1.0), opts);
    const RunResult b = dns_run(pulse_problem(1600, 0.04, DnsIntegrator::SubStep, 1.0), opts);
    const RunResult c = dns_run(pulse_problem(3200, 0.04, DnsIntegrator::SubStep, 1.0), opts);
    const double coarse = relative_error_linf(a, c, 0.3).value;
    const double fine = relative_error_linf(b, c, 0.3).value;
    CHECK(fine < coarse);
    CHECK(coarse < 0.05);
  }
}

TEST_CASE("central differences conserve energy on the linear pulse") {
  const RunResult r = dns_run(pulse_problem(800, 1e-5, DnsIntegrator::CentralDifference, 1.0), {0.3, {}, true});
  for (double e : r.energy) CHECK(std::abs(e - r.energy.front()) < 0.01 * r.energy.front());
}

TEST_CASE("folded reference mesh is reported") {
  // A pulse steep enough to invert elements immediately.
  DnsProblem p = pulse_problem(100, 0.2, DnsIntegrator::SubStep, 1.0);
  try {
    dns_run(p, {0.05, {}, false});
    FAIL("expected NonPositiveStretch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonPositiveStretch);
  }
}
