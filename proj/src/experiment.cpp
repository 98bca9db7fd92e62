#include "vme/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vme/error.hpp"

namespace vme {

namespace fs = std::filesystem;

namespace {

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> error_times(const RunConfig& c) {
  if (!c.error_times.empty()) return c.error_times;
  if (!c.snapshot_times.empty()) return c.snapshot_times;
  return {c.end_time};
}

RunOptions run_options(const RunConfig& c) {
  RunOptions opt;
  opt.end_time = c.end_time;
  std::set<double> times(c.snapshot_times.begin(), c.snapshot_times.end());
  for (double t : error_times(c)) times.insert(t);
  opt.snapshot_times.assign(times.begin(), times.end());
  opt.record_energy = c.record_energy;
  return opt;
}

}  // namespace

MultiscaleIntegrator make_integrator(const RunConfig& c) {
  return MultiscaleIntegrator(build_mesh(c.n_es, c.n_ecp, c.n_ef, {}, c.coarse_order),
                              build_modulus_field(c.micro, c.n_es, c.n_ef), c.integrator);
}

Vector initial_coarse_displacement(const RunConfig& c, const TwoScaleMesh& mesh) {
  return build_initial_condition(c.pulse, mesh);
}

DnsProblem make_dns_problem(const RunConfig& c) {
  DnsProblem p;
  p.mesh = build_single_scale_mesh(c.dns_elements());
  p.material = build_modulus_field(c.micro, c.n_es, c.dns_elements() / c.n_es);
  p.d0 = build_initial_condition(c.pulse, p.mesh);
  p.v0 = Vector::Zero(p.d0.size());
  p.integrator = c.dns_integrator;
  p.cfl = c.dns_cfl > 0.0 ? c.dns_cfl : c.integrator.cfl;
  p.p = c.integrator.p;
  return p;
}

ExperimentOutcome run_experiment(const RunConfig& c) {
  ExperimentOutcome out;
  const RunOptions opt = run_options(c);
  if (c.solver != SolverChoice::Dns) {
    MultiscaleIntegrator integrator = make_integrator(c);
    const Vector d0 = initial_coarse_displacement(c, integrator.mesh());
    MultiscaleState s = integrator.make_state(d0, Vector::Zero(d0.size()));
    out.vme = integrator.run(std::move(s), opt);
  }
  if (c.solver != SolverChoice::Vme) out.dns = dns_run(make_dns_problem(c), opt);
  if (out.vme && out.dns) {
    for (double t : error_times(c))
      out.errors.push_back({t, relative_error_linf(*out.vme, *out.dns, t, c.integrator.denom_floor)});
  }
  return out;
}

void write_snapshots_csv(const std::vector<Snapshot>& snapshots, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::ValidationError, "cannot write " + path.string());
  out << "time,X,u_total,u_coarse,u_fine,F_avg\n";
  for (const Snapshot& s : snapshots) {
    for (std::size_t j = 0; j < s.x.size(); ++j) {
      out << g17(s.time) << ',' << g17(s.x[j]) << ',' << g17(s.u_total[j]) << ','
          << g17(s.u_coarse[j]) << ',' << g17(s.u_fine[j]) << ',';
      // The element average is reported on the element's midpoint row.
      if (j % 2 == 1) out << g17(s.f_avg[j / 2]);
      out << '\n';
    }
  }
}

std::vector<Snapshot> read_snapshots_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::string line;
  std::getline(in, line);
  if (line != "time,X,u_total,u_coarse,u_fine,F_avg")
    throw Error(ErrorCode::ParseError, path.string() + ": unexpected header");
  std::vector<Snapshot> snaps;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (cells.size() == 5) cells.emplace_back();
    if (cells.size() != 6)
      throw Error(ErrorCode::ParseError, path.string() + ": bad row " + std::to_string(row));
    const double t = std::stod(cells[0]);
    if (snaps.empty() || snaps.back().time != t) {
      snaps.emplace_back();
      snaps.back().time = t;
    }
    Snapshot& s = snaps.back();
    s.x.push_back(std::stod(cells[1]));
    s.u_total.push_back(std::stod(cells[2]));
    s.u_coarse.push_back(std::stod(cells[3]));
    s.u_fine.push_back(std::stod(cells[4]));
    if (!cells[5].empty()) s.f_avg.push_back(std::stod(cells[5]));
  }
  return snaps;
}

namespace {

nlohmann::json run_json(const RunResult& r) {
  nlohmann::json j;
  int max_split = 0, max_newton = 0;
  long total_split = 0;
  double dt_min = 0.0, dt_max = 0.0;
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const StepRecord& s = r.steps[i];
    max_split = std::max(max_split, s.split_iters);
    max_newton = std::max(max_newton, s.newton_iters);
    total_split += s.split_iters;
    dt_min = i == 0 ? s.dt : std::min(dt_min, s.dt);
    dt_max = i == 0 ? s.dt : std::max(dt_max, s.dt);
  }
  j["steps"] = r.steps.size();
  j["final_time"] = r.snapshots.empty() ? 0.0 : (r.steps.empty() ? 0.0 : r.steps.back().time);
  j["wall_seconds"] = r.wall_seconds;
  j["split_iterations"] = {{"max", max_split},
                           {"mean", r.steps.empty() ? 0.0 : double(total_split) / r.steps.size()}};
  j["max_newton_iterations"] = max_newton;
  j["initial_split_iterations"] = r.initial_split_iters;
  j["dt"] = {{"min", dt_min}, {"max", dt_max}};
  std::vector<double> times;
  for (const Snapshot& s : r.snapshots) times.push_back(s.time);
  j["snapshot_times"] = times;
  j["warnings"] = r.warnings;
  if (!r.energy.empty()) j["energy"] = r.energy;
  return j;
}

void write_steps(std::ostream& out, const std::string& tag, const RunResult& r) {
  for (const StepRecord& s : r.steps)
    out << tag << " step=" << s.step << " t=" << g17(s.time) << " dt=" << g17(s.dt)
        << " split=" << s.split_iters << " newton=" << s.newton_iters
        << " worst=" << s.worst_subdomain << '\n';
}

}  // namespace

void write_outputs(const RunConfig& c, const ExperimentOutcome& o, const fs::path& dir) {
  fs::create_directories(dir);
  if (o.vme) write_snapshots_csv(o.vme->snapshots, dir / "snapshots.csv");
  if (o.dns) write_snapshots_csv(o.dns->snapshots, dir / (o.vme ? "reference_snapshots.csv" : "snapshots.csv"));

  nlohmann::json j;
  j["config"] = {{"label", c.label},
                 {"solver", to_string(c.solver)},
                 {"n_es", c.n_es},
                 {"n_ecp", c.n_ecp},
                 {"n_ef", c.n_ef},
                 {"coarse_order", c.coarse_order},
                 {"n_el", c.dns_elements()},
                 {"contrast", c.micro.contrast},
                 {"fraction", c.micro.fraction},
                 {"scheme", to_string(c.integrator.scheme)},
                 {"p", c.integrator.p},
                 {"cfl", c.integrator.cfl},
                 {"tol_c", c.integrator.tol_c},
                 {"tol_f", c.integrator.tol_f},
                 {"tol_newton", c.integrator.tol_newton},
                 {"freeze_fine", c.integrator.freeze_fine},
                 {"a", c.pulse.amplitude},
                 {"c", c.pulse.width},
                 {"end_time", c.end_time}};
  if (o.vme) j["vme"] = run_json(*o.vme);
  if (o.dns) j["dns"] = run_json(*o.dns);
  nlohmann::json errors = nlohmann::json::array();
  for (const ErrorRow& e : o.errors)
    errors.push_back({{"requested_time", e.requested},
                      {"vme_time", e.report.time_a},
                      {"dns_time", e.report.time_b},
                      {"relative_error_linf", e.report.value}});
  j["errors"] = errors;
  std::ofstream(dir / "metrics.json") << j.dump(2) << '\n';

  std::ofstream log(dir / "steps.log");
  if (o.vme) write_steps(log, "vme", *o.vme);
  if (o.dns) write_steps(log, "dns", *o.dns);
}

std::vector<MatrixRow> run_matrix(const fs::path& manifest, const fs::path& out_dir, int workers) {
  std::ifstream in(manifest);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open manifest " + manifest.string());
  std::vector<MatrixRow> rows;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line.erase(0, line.find_first_not_of(" \t\r"));
    line.erase(line.find_last_not_of(" \t\r") + 1);
    if (line.empty()) continue;
    MatrixRow row;
    const fs::path path = fs::path(line).is_absolute() ? fs::path(line) : manifest.parent_path() / line;
    row.config_path = path.string();
    row.label = path.stem().string();
    try {
      RunConfig c = load_config(path.string());
      c.integrator.workers = workers;
      if (!c.label.empty()) row.label = c.label;
      row.contrast = c.micro.contrast;
      row.scheme = to_string(c.integrator.scheme);
      row.n_ef = c.n_ef;
      row.cfl = c.integrator.cfl;
      const ExperimentOutcome o = run_experiment(c);
      write_outputs(c, o, out_dir / path.stem());
      if (o.vme) row.wall_seconds = o.vme->wall_seconds;
      else if (o.dns) row.wall_seconds = o.dns->wall_seconds;
      if (!o.errors.empty()) {
        row.error = o.errors.back().report.value;
        row.error_time = o.errors.back().report.time_a;
      }
      row.ok = true;
    } catch (const std::exception& e) {
      row.failure = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

std::string format_matrix_table(const std::vector<MatrixRow>& rows) {
  std::ostringstream out;
  out << std::left << std::setw(28) << "run" << std::right << std::setw(10) << "contrast"
      << std::setw(9) << "scheme" << std::setw(6) << "n_ef" << std::setw(7) << "CFL"
      << std::setw(12) << "wall [s]" << std::setw(14) << "rel. error" << std::setw(10) << "at t"
      << '\n';
  for (const MatrixRow& r : rows) {
    out << std::left << std::setw(28) << r.label << std::right;
    if (!r.ok) {
      out << "  FAILED: " << r.failure << '\n';
      continue;
    }
    out << std::setw(10) << r.contrast << std::setw(9) << r.scheme << std::setw(6) << r.n_ef
        << std::setw(7) << r.cfl << std::setw(12) << std::fixed << std::setprecision(2)
        << r.wall_seconds << std::setw(14) << std::scientific << std::setprecision(4) << r.error
        << std::setw(10) << std::fixed << std::setprecision(4) << r.error_time << '\n';
    out.unsetf(std::ios::floatfield);
    out << std::setprecision(6);
  }
  return out.str();
}

void write_matrix_csv(const std::vector<MatrixRow>& rows, const fs::path& path) {
  std::ofstream out(path);
  out << "run,config,status,contrast,scheme,n_ef,cfl,wall_seconds,relative_error,error_time,failure\n";
  for (const MatrixRow& r : rows) {
    std::string failure = r.failure;
    std::replace(failure.begin(), failure.end(), ',', ';');
    std::replace(failure.begin(), failure.end(), '\n', ' ');
    out << r.label << ',' << r.config_path << ',' << (r.ok ? "ok" : "failed") << ',' << g17(r.contrast)
        << ',' << r.scheme << ',' << r.n_ef << ',' << g17(r.cfl) << ',' << g17(r.wall_seconds) << ','
        << g17(r.error) << ',' << g17(r.error_time) << ',' << failure << '\n';
  }
}

}  // namespace vme
