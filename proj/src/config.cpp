#include "vme/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "vme/error.hpp"

namespace vme {

std::string to_string(SolverChoice s) {
  switch (s) {
    case SolverChoice::Vme: return "vme";
    case SolverChoice::Dns: return "dns";
    case SolverChoice::Both: return "both";
  }
  return "unknown";
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Entry {
  std::string value;
  int line;
};

// Collects parse-level problems so that one error can list all of them.
class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  std::optional<std::string> text(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    used_.insert(key);
    return it->second.value;
  }

  template <class T>
  void number(const std::string& key, T& out) {
    const auto v = text(key);
    if (!v) return;
    std::istringstream in(*v);
    T parsed{};
    in >> parsed;
    if (in.fail() || !(in >> std::ws).eof()) {
      fail(key, "expected a number, got '" + *v + "'");
      return;
    }
    out = parsed;
  }

  void flag(const std::string& key, bool& out) {
    const auto v = text(key);
    if (!v) return;
    const std::string s = lower(*v);
    if (s == "true" || s == "yes" || s == "1") out = true;
    else if (s == "false" || s == "no" || s == "0") out = false;
    else fail(key, "expected a boolean, got '" + *v + "'");
  }

  void list(const std::string& key, std::vector<double>& out) {
    const auto v = text(key);
    if (!v) return;
    out.clear();
    std::string item;
    std::istringstream in(*v);
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (item.empty()) continue;
      std::istringstream num(item);
      double x = 0.0;
      num >> x;
      if (num.fail() || !(num >> std::ws).eof()) {
        fail(key, "expected a comma-separated list of numbers, got '" + *v + "'");
        return;
      }
      out.push_back(x);
    }
  }

  void fail(const std::string& key, const std::string& why) {
    const auto it = entries_.find(key);
    problems_ << " line " << (it == entries_.end() ? 0 : it->second.line) << ", " << key << ": "
              << why << ";";
  }

  void check_unused() {
    for (const auto& [key, entry] : entries_)
      if (!used_.count(key)) problems_ << " line " << entry.line << ": unknown key " << key << ";";
  }

  std::string problems() const { return problems_.str(); }

 private:
  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
  std::ostringstream problems_;
};

std::map<std::string, Entry> tokenize(const std::string& text) {
  std::map<std::string, Entry> entries;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::ostringstream bad;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string s = raw;
    const auto hash = s.find_first_of("#;");
    if (hash != std::string::npos) s.erase(hash);
    s = trim(s);
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        bad << " line " << line << ": unterminated section header;";
        continue;
      }
      section = lower(trim(s.substr(1, s.size() - 2)));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      bad << " line " << line << ": expected key = value;";
      continue;
    }
    const std::string key = lower(trim(s.substr(0, eq)));
    const std::string full = section.empty() ? key : section + "." + key;
    if (key.empty()) {
      bad << " line " << line << ": empty key;";
      continue;
    }
    if (entries.count(full)) {
      bad << " line " << line << ": duplicate key " << full << ";";
      continue;
    }
    entries[full] = {trim(s.substr(eq + 1)), line};
  }
  if (!bad.str().empty()) throw Error(ErrorCode::ParseError, bad.str());
  return entries;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Reader r(tokenize(text));
  RunConfig c;

  if (auto v = r.text("label")) c.label = *v;
  if (auto v = r.text("solver")) {
    const std::string s = lower(*v);
    if (s == "vme") c.solver = SolverChoice::Vme;
    else if (s == "dns") c.solver = SolverChoice::Dns;
    else if (s == "both") c.solver = SolverChoice::Both;
    else r.fail("solver", "expected vme, dns or both");
  }

  r.number("mesh.n_es", c.n_es);
  r.number("mesh.n_ecp", c.n_ecp);
  r.number("mesh.n_ef", c.n_ef);
  r.number("mesh.coarse_order", c.coarse_order);
  r.number("mesh.n_el", c.n_el);

  r.number("material.contrast", c.micro.contrast);
  r.number("material.fraction", c.micro.fraction);

  IntegratorConfig& ic = c.integrator;
  if (auto v = r.text("integrator.scheme")) {
    const std::string s = lower(*v);
    if (s == "ee-cdm") ic.scheme = Scheme::EeCdm;
    else if (s == "ee-ssm") ic.scheme = Scheme::EeSsm;
    else if (s == "ei-ssm") ic.scheme = Scheme::EiSsm;
    else r.fail("integrator.scheme", "expected EE-CDM, EE-SSM or EI-SSM");
  }
  const bool has_cfl = r.has("integrator.cfl");
  ic.cfl = 0.0;
  r.number("integrator.cfl", ic.cfl);
  r.number("integrator.p", ic.p);
  r.number("integrator.tol_c", ic.tol_c);
  r.number("integrator.tol_f", ic.tol_f);
  r.number("integrator.tol_newton", ic.tol_newton);
  r.number("integrator.max_split_iters", ic.max_split_iters);
  r.number("integrator.max_newton_iters", ic.max_newton_iters);
  r.number("integrator.denom_floor", ic.denom_floor);
  r.flag("integrator.freeze_fine", ic.freeze_fine);
  r.flag("integrator.zero_coupling", ic.zero_coupling);
  r.number("integrator.workers", ic.workers);
  if (auto v = r.text("integrator.dns_integrator")) {
    const std::string s = lower(*v);
    if (s == "cdm") c.dns_integrator = DnsIntegrator::CentralDifference;
    else if (s == "substep") c.dns_integrator = DnsIntegrator::SubStep;
    else r.fail("integrator.dns_integrator", "expected cdm or substep");
  }
  r.number("integrator.dns_cfl", c.dns_cfl);

  r.number("pulse.a", c.pulse.amplitude);
  r.number("pulse.c", c.pulse.width);

  r.number("output.end_time", c.end_time);
  r.list("output.snapshot_times", c.snapshot_times);
  r.list("output.error_times", c.error_times);
  if (auto v = r.text("output.directory")) c.output_dir = *v;
  r.flag("output.record_energy", c.record_energy);

  // Dimensional inputs: pulse lengths in the unit of `length`, times in the
  // unit implied by length / sqrt(modulus / density).
  std::string units = "nondimensional";
  if (auto v = r.text("units.system")) units = lower(*v);
  ReferenceScales scales;
  r.number("units.length", scales.length);
  r.number("units.modulus", scales.modulus);
  r.number("units.density", scales.density);

  r.check_unused();
  if (!r.problems().empty()) throw Error(ErrorCode::ParseError, r.problems());

  std::ostringstream bad;
  if (units == "dimensional") {
    if (!(scales.length > 0.0 && scales.modulus > 0.0 && scales.density > 0.0)) {
      bad << " units: length, modulus and density must be positive;";
    } else {
      c.pulse.amplitude = scales.to_nondimensional_length(c.pulse.amplitude);
      c.pulse.width = scales.to_nondimensional_length(c.pulse.width);
      c.end_time = scales.to_nondimensional_time(c.end_time);
      for (double& t : c.snapshot_times) t = scales.to_nondimensional_time(t);
      for (double& t : c.error_times) t = scales.to_nondimensional_time(t);
    }
  } else if (units != "nondimensional") {
    bad << " units.system must be nondimensional or dimensional;";
  }

  if (!has_cfl) bad << " integrator.cfl is required;";
  else if (!(ic.cfl > 0.0)) bad << " integrator.cfl must be positive;";
  if (c.n_es < 1) bad << " mesh.n_es must be >= 1;";
  if (c.n_ecp < 1) bad << " mesh.n_ecp must be >= 1;";
  if (c.n_ef < c.n_ecp) bad << " mesh.n_ef must be >= mesh.n_ecp;";
  if (c.n_ecp >= 1 && c.n_ef % c.n_ecp != 0) bad << " mesh.n_ef must be divisible by mesh.n_ecp;";
  if (c.coarse_order != 1 && c.coarse_order != 2) bad << " mesh.coarse_order must be 1 or 2;";
  if (c.n_el < 0) bad << " mesh.n_el must be >= 0;";
  if (c.n_el > 0 && c.n_el % c.n_es != 0) bad << " mesh.n_el must be a multiple of mesh.n_es;";
  if (!(c.micro.contrast > 0.0)) bad << " material.contrast must be positive;";
  if (!(c.micro.fraction > 0.0 && c.micro.fraction < 1.0)) bad << " material.fraction must lie in (0, 1);";
  const auto conforming = [&](int per_cell) {
    const double s = c.micro.fraction * per_cell;
    return std::abs(s - std::round(s)) <= 1e-9 * per_cell;
  };
  if (c.micro.contrast != 1.0 && c.n_ef >= 1 && !conforming(c.n_ef))
    bad << " material.fraction * mesh.n_ef must be an integer;";
  if (c.micro.contrast != 1.0 && c.n_es >= 1 && c.dns_elements() % c.n_es == 0 &&
      !conforming(c.dns_elements() / c.n_es))
    bad << " material.fraction * (reference elements per cell) must be an integer;";
  if (!(c.pulse.width > 0.0)) bad << " pulse.c must be positive;";
  if (!(c.end_time >= 0.0)) bad << " output.end_time must be >= 0;";
  for (double t : c.snapshot_times)
    if (t < 0.0 || t > c.end_time) bad << " output.snapshot_times entry " << t << " outside [0, end_time];";
  for (double t : c.error_times)
    if (t < 0.0 || t > c.end_time) bad << " output.error_times entry " << t << " outside [0, end_time];";
  if (c.dns_cfl < 0.0) bad << " integrator.dns_cfl must be positive;";
  try {
    IntegratorConfig probe = ic;
    if (!(probe.cfl > 0.0)) probe.cfl = 1.0;
    validate(probe);
  } catch (const Error& e) {
    bad << e.detail();
  }
  if (!bad.str().empty()) throw Error(ErrorCode::ValidationError, bad.str());
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open config " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace vme
