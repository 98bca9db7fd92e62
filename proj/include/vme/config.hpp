#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vme/dns.hpp"
#include "vme/integrate.hpp"
#include "vme/mesh.hpp"
#include "vme/scenario.hpp"

namespace vme {

enum class SolverChoice { Vme, Dns, Both };

/// A complete, validated run description in nondimensional units.
struct RunConfig {
  std::string label;
  SolverChoice solver = SolverChoice::Both;

  int n_es = 100;
  int n_ecp = 1;
  int n_ef = 8;
  int coarse_order = 2;
  int n_el = 0;  // reference elements; 0 means n_es * n_ef

  Microstructure micro;
  InitialPulse pulse;

  IntegratorConfig integrator;
  DnsIntegrator dns_integrator = DnsIntegrator::SubStep;
  double dns_cfl = 0.0;  // 0 means the integrator CFL

  double end_time = 0.3;
  std::vector<double> snapshot_times;
  std::vector<double> error_times;  // empty means every snapshot time
  std::string output_dir = "out";
  bool record_energy = false;

  int dns_elements() const { return n_el > 0 ? n_el : n_es * n_ef; }
};

/// Parses an INI-style document: top-level keys, then [mesh], [material],
/// [integrator], [pulse], [output] and [units] sections. Throws ParseError
/// for malformed lines or unknown keys and ValidationError listing every
/// violated constraint.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::string to_string(SolverChoice s);

}  // namespace vme
