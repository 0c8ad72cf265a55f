#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>

#include "topoloc/dynamics.hpp"
#include "topoloc/error.hpp"
#include "topoloc/parallel.hpp"
#include "topoloc/qpt.hpp"

#ifndef TOPOLOC_VERSION
#define TOPOLOC_VERSION "0.0.0"
#endif

namespace topoloc::cli {

namespace {

using nlohmann::json;

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

std::vector<std::size_t> labels_of(const std::vector<std::size_t>& qubits) {
  std::vector<std::size_t> out;
  for (auto q : qubits) out.push_back(q + 1);
  return out;
}

class Table {
 public:
  Table(const ExperimentConfig& config, std::vector<std::string> columns)
      : hash_(config.hash()), columns_(std::move(columns)) {}

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw std::logic_error("CSV row width mismatch");
    rows_.push_back(cells);
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << "# topoloc " << tool_version() << " config_hash=" << hash_ << "\n";
    out << "config_hash";
    for (const auto& c : columns_) out << "," << c;
    out << "\n";
    for (const auto& r : rows_) {
      out << hash_;
      for (const auto& c : r) out << "," << c;
      out << "\n";
    }
  }

 private:
  std::string hash_;
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
};

struct Outputs {
  std::filesystem::path dir;
  std::string prefix;
  std::filesystem::path file(const std::string& suffix) const { return dir / (prefix + suffix); }
};

Outputs prepare_outputs(const ExperimentConfig& config, const std::string& command) {
  Outputs o{config.output.dir, config.output.prefix.empty() ? command : config.output.prefix};
  std::error_code ec;
  std::filesystem::create_directories(o.dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + config.output.dir + "': " + ec.message());
  return o;
}

json metadata(const ExperimentConfig& config, const std::string& command, const std::string& started,
              std::size_t workers) {
  return {{"tool", "topoloc"},
          {"version", tool_version()},
          {"command", command},
          {"config_hash", config.hash()},
          {"config", config.to_json()},
          {"workers", workers},
          {"started_at", started},
          {"finished_at", utc_now()}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << "\n";
}

json lattice_json(const CodeLattice& lat) {
  json j;
  j["description"] = lat.describe();
  j["kind"] = to_string(lat.kind());
  j["n_qubits"] = lat.n_qubits();
  j["width"] = lat.width();
  j["height"] = lat.height();
  auto stabs = [](const std::vector<Stabilizer>& list) {
    json a = json::array();
    for (const auto& s : list) {
      json e = {{"qubits", labels_of(s.qubits)}};
      if (s.color) e["color"] = to_string(*s.color);
      a.push_back(e);
    }
    return a;
  };
  j["plaquettes"] = stabs(lat.plaquettes());
  j["vertices"] = stabs(lat.vertices());
  json edges = json::array();
  for (auto e : lat.edges()) edges.push_back({e[0] + 1, e[1] + 1});
  j["edges"] = edges;
  json coords = json::array();
  for (auto c : lat.coordinates()) coords.push_back({c[0], c[1]});
  j["coordinates"] = coords;
  return j;
}

json region_json(const Region& r) {
  return {{"omega", labels_of(r.omega)}, {"omega_bar", labels_of(r.omega_bar)}, {"part_a", labels_of(r.part_a)}};
}

std::vector<std::size_t> zero_based(const std::vector<std::size_t>& labels, std::size_t n) {
  std::vector<std::size_t> out;
  for (auto l : labels) {
    if (l == 0 || l > n) throw ConfigError("bipartition.part_a label " + std::to_string(l) + " is out of range");
    out.push_back(l - 1);
  }
  return out;
}

std::optional<MeasurementSetup> parse_setup(const ExperimentConfig& config, const CodeLattice& lat,
                                            const std::vector<std::size_t>& part_a) {
  if (config.bounds.setup.empty()) return std::nullopt;
  const Region r = Region::make(lat.n_qubits(), lat.loop_support(config.loop), part_a);
  try {
    return MeasurementSetup::parse(config.bounds.setup, r);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("bounds.setup: ") + e.what());
  }
}

SolverOptions solver_of(const ExperimentConfig& config) {
  SolverOptions s;
  s.max_qubits = config.run.max_qubits;
  return s;
}

SweepOptions sweep_options(const ExperimentConfig& config, const CodeLattice& lat, std::size_t workers) {
  SweepOptions o;
  o.le = config.bounds.le;
  o.rle = config.bounds.rle;
  o.e_prime = config.bounds.e_prime;
  o.e_dprime = config.bounds.e_dprime;
  o.witness = config.bounds.witness && lat.kind() == CodeKind::kitaev;
  o.normalized = config.bounds.normalized;
  o.part_a = zero_based(config.part_a, lat.n_qubits());
  o.setup = parse_setup(config, lat, o.part_a);
  o.p_c = config.preferred_set.p_c;
  o.calibration_g = config.preferred_set.calibration_g;
  o.rle_options.max_measured = config.optimizer.max_measured_rle;
  o.le_options.max_measured = config.optimizer.max_measured_le;
  o.le_options.seed = config.optimizer.seed;
  o.le_options.random_starts = config.optimizer.random_starts;
  o.le_options.pauli_seeds = config.optimizer.pauli_seeds;
  o.le_options.max_evaluations_per_start = config.optimizer.max_evaluations;
  o.le_options.tolerance = config.optimizer.tolerance;
  o.solver = solver_of(config);
  o.workers = workers;
  return o;
}

}  // namespace

std::string tool_version() { return TOPOLOC_VERSION; }

int cmd_sweep(const ExperimentConfig& config, std::ostream& log) {
  const std::string started = utc_now();
  const CodeLattice lat = config.lattice();
  const std::size_t workers = resolve_workers(config.run.workers);
  if (config.bounds.witness && lat.kind() != CodeKind::kitaev) {
    log << "note: witnesses are defined for the kitaev code only; E_w is skipped\n";
  }
  const SweepOptions opts = sweep_options(config, lat, workers);
  const Outputs out = prepare_outputs(config, "sweep");
  const SweepRecord rec = sweep(lat, config.loop, config.g_grid(), opts);

  std::vector<std::string> cols{"g", "energy"};
  if (opts.le) cols.push_back("E_L");
  if (opts.rle) cols.push_back("E_RL");
  if (opts.e_prime) cols.push_back("E_prime");
  if (opts.e_dprime) cols.insert(cols.end(), {"E_dprime", "eps_m"});
  if (opts.witness) cols.insert(cols.end(), {"W", "E_w"});
  cols.push_back("hierarchy_ok");
  Table table(config, cols);
  for (const auto& p : rec.points) {
    std::vector<std::string> r{num(p.g), num(p.energy)};
    if (opts.le) r.push_back(opt(p.le));
    if (opts.rle) r.push_back(opt(p.rle));
    if (opts.e_prime) r.push_back(opt(p.e_prime));
    if (opts.e_dprime) r.insert(r.end(), {opt(p.e_dprime), opt(p.eps_m)});
    if (opts.witness) r.insert(r.end(), {opt(p.w), opt(p.e_w)});
    r.push_back(hierarchy_violations(p, opts.hierarchy_tolerance).empty() ? "1" : "0");
    table.row(r);
  }
  table.write(out.file(".csv"));

  json j = metadata(config, "sweep", started, workers);
  j["lattice"] = lattice_json(lat);
  j["loop"] = config.loop.to_string();
  j["region"] = region_json(rec.region);
  if (opts.e_prime || opts.e_dprime) j["setup"] = rec.setup.to_string();
  if (rec.preferred) {
    j["preferred_set"] = {{"size", rec.preferred->size()},
                          {"p_c", rec.preferred->p_c},
                          {"calibration_g", rec.preferred->calibration},
                          {"outcome_space", std::size_t{1} << rec.region.omega_bar.size()}};
  }
  if (opts.witness) j["witness"] = {{"generators", rec.witness_labels}, {"hub", rec.region.part_a.front() + 1}};
  if (opts.rle) {
    json best = json::array();
    for (const auto& p : rec.points) best.push_back({{"g", p.g}, {"setup", p.rle_setup ? p.rle_setup->to_string() : ""}});
    j["rle_setups"] = best;
  }
  j["rows"] = rec.points.size();
  j["hierarchy_violations"] = rec.violations;
  j["files"] = {out.file(".csv").filename().string()};
  write_json(out.file(".json"), j);

  log << "sweep: " << rec.points.size() << " points on " << lat.describe() << ", " << config.loop.to_string()
      << " -> " << out.file(".csv").string() << "\n";
  if (!rec.violations.empty()) {
    for (const auto& v : rec.violations) log << "hierarchy violation: " << v << "\n";
    return kInvariantFailure;
  }
  return kSuccess;
}

int cmd_dynamics(const ExperimentConfig& config, std::ostream& log) {
  const std::string started = utc_now();
  const CodeLattice lat = config.lattice();
  const std::size_t workers = resolve_workers(config.run.workers);
  const Outputs out = prepare_outputs(config, "dynamics");
  const auto part_a = zero_based(config.part_a, lat.n_qubits());
  const auto setup = parse_setup(config, lat, part_a);

  struct Job {
    double s, g;
    std::vector<TrajectoryRow> rows;
    EvolveStats stats;
  };
  std::vector<Job> jobs;
  for (double g : config.dynamics.g) {
    for (double s : config.bath.s) jobs.push_back({s, g, {}, {}});
  }
  parallel_for(jobs.size(), workers, [&](std::size_t i) {
    TrajectoryConfig tc;
    tc.g = jobs[i].g;
    tc.bath = {jobs[i].s, config.bath.omega_c};
    tc.evolve.t_end = config.time.t_end;
    tc.evolve.dt = config.time.dt;
    tc.evolve.record_every = config.time.record_every;
    tc.evolve.threshold = config.time.threshold;
    tc.evolve.max_support = config.time.max_support;
    tc.p_c = config.preferred_set.p_c;
    tc.calibration_g = config.preferred_set.calibration_g;
    tc.setup = setup;
    tc.part_a = part_a;
    tc.normalized = config.bounds.normalized;
    tc.solver = solver_of(config);
    jobs[i].rows = run_trajectory(lat, config.loop, tc, &jobs[i].stats);
  });

  const bool witness = !jobs.empty() && !jobs.front().rows.empty() && jobs.front().rows.front().has_witness;
  std::vector<std::string> cols{"s", "g", "t", "gamma", "trace", "purity", "E_dprime", "eps_m"};
  if (witness) cols.push_back("E_w");
  Table table(config, cols);
  for (const auto& job : jobs) {
    for (const auto& r : job.rows) {
      std::vector<std::string> row{num(job.s),
                                   num(job.g),
                                   num(r.point.t),
                                   num(r.point.gamma),
                                   num(r.point.trace),
                                   num(r.point.purity),
                                   num(r.e_dprime),
                                   num(r.eps_m)};
      if (witness) row.push_back(num(r.e_w));
      table.row(row);
    }
  }
  table.write(out.file("_trajectory.csv"));

  auto series = [](const Job& job, bool w) {
    std::vector<double> t, e;
    for (const auto& r : job.rows) {
      t.push_back(r.point.t);
      e.push_back(w ? r.e_w : r.e_dprime);
    }
    return std::pair{t, e};
  };
  auto ect_json = [](const EctResult& r) { return json{{"tau", r.tau}, {"E_c", r.e_c}, {"kind", to_string(r.kind)}}; };

  json runs = json::array();
  for (const auto& job : jobs) {
    json run = {{"s", job.s},
                {"g", job.g},
                {"markovian", job.s <= 2.0},
                {"records", job.stats.records},
                {"steps", job.stats.steps},
                {"max_trace_drift_rate", job.stats.max_trace_drift_rate},
                {"max_hermiticity_error", job.stats.max_hermiticity},
                {"min_eigenvalue", job.stats.min_eigenvalue},
                {"dropped_entries", job.stats.dropped_entries}};
    json ect = json::object();
    for (bool w : {false, true}) {
      if (w && !witness) continue;
      const char* key = w ? "E_w" : "E_dprime";
      const auto [t, e] = series(job, w);
      try {
        if (job.s > 2.0) {
          ect[key] = ect_json(collapse_time_trough(t, e));
        } else {
          // Markovian runs use the level of the first non-Markovian partner at the same g.
          std::optional<double> level;
          for (const auto& other : jobs) {
            if (other.g != job.g || other.s <= 2.0) continue;
            const auto [to, eo] = series(other, w);
            level = collapse_time_trough(to, eo).e_c;
            break;
          }
          if (level) {
            ect[key] = ect_json(collapse_time_crossing(t, e, *level));
          } else {
            ect[key] = {{"skipped", "no non-Markovian partner run at this g"}};
          }
        }
      } catch (const InvalidArgument& ex) {
        ect[key] = {{"skipped", ex.what()}};
      }
    }
    run["ect"] = ect;
    runs.push_back(run);
  }
  json j = metadata(config, "dynamics", started, workers);
  j["lattice"] = lattice_json(lat);
  j["loop"] = config.loop.to_string();
  j["runs"] = runs;
  j["files"] = {out.file("_trajectory.csv").filename().string()};
  write_json(out.file(".json"), j);
  log << "dynamics: " << jobs.size() << " runs on " << lat.describe() << " -> " << out.file("_trajectory.csv").string()
      << "\n";
  return kSuccess;
}

int cmd_scaling(const ExperimentConfig& config, std::ostream& log) {
  const std::string started = utc_now();
  if (config.scaling.sizes.size() < 3) {
    throw ConfigError("scaling needs at least 3 lattice sizes, got " + std::to_string(config.scaling.sizes.size()));
  }
  if (config.model.kind != CodeKind::kitaev) throw ConfigError("scaling is implemented for the kitaev code only");
  const std::size_t workers = resolve_workers(config.run.workers);
  const Outputs out = prepare_outputs(config, "scaling");
  const double g_c = critical_point(CodeKind::kitaev);

  struct Row {
    std::size_t n;
    std::string lattice;
    PeakResult peak;
    std::size_t used_points;
  };
  std::vector<Row> rows;
  if (config.scaling.synthetic) {
    for (auto n : config.scaling.sizes) {
      PeakResult p;
      p.g_m = g_c + config.scaling.synthetic_amplitude *
                        std::pow(static_cast<double>(n), -config.scaling.synthetic_exponent);
      rows.push_back({n, "synthetic", p, 0});
    }
  } else {
    auto grid = config.g_grid();
    if (config.scaling.refine.size() == 3) {
      grid = refine_grid(grid, config.scaling.refine[0], config.scaling.refine[1], config.scaling.refine[2]);
    }
    for (auto n : config.scaling.sizes) {
      CodeLattice lat;
      try {
        lat = kitaev_lattice_for(n);
      } catch (const InvalidArgument& e) {
        throw ConfigError(std::string("scaling.sizes: ") + e.what());
      }
      SweepOptions o;
      o.e_prime = config.scaling.bound == "E_prime";
      o.e_dprime = config.scaling.bound == "E_dprime";
      o.witness = true;  // also fixes A to the witness hub
      o.normalized = config.bounds.normalized;
      o.part_a = zero_based(config.part_a, lat.n_qubits());
      o.p_c = config.preferred_set.p_c;
      o.calibration_g = config.preferred_set.calibration_g;
      o.solver = solver_of(config);
      o.workers = workers;
      const SweepRecord rec = sweep(lat, config.loop, grid, o);
      const BoundKind kind = config.scaling.bound == "E_w"         ? BoundKind::E_witness
                             : config.scaling.bound == "E_prime" ? BoundKind::E_prime
                                                                   : BoundKind::E_double_prime;
      auto e = rec.series(kind);
      std::size_t used = e.size();
      if (kind == BoundKind::E_witness) used = positive_prefix(e);
      const auto g = rec.grid();
      const PeakResult peak = derivative_peak(std::span(g).first(used), std::span<const double>(e).first(used),
                                              config.scaling.max_spacing);
      rows.push_back({n, lat.describe(), peak, used});
      log << "scaling: N=" << n << " g_m=" << peak.g_m << "\n";
    }
  }
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : rows) pts.emplace_back(static_cast<double>(r.n), r.peak.g_m);
  const ScalingFit fit = fit_scaling(pts, g_c);

  Table table(config, {"N", "lattice", "g_m", "peak_height", "points_used"});
  for (const auto& r : rows) {
    table.row({std::to_string(r.n), r.lattice, num(r.peak.g_m), num(r.peak.height), std::to_string(r.used_points)});
  }
  table.write(out.file("_peaks.csv"));
  const bool witness = config.scaling.bound == "E_w";
  json j = metadata(config, "scaling", started, workers);
  j["bound"] = config.scaling.bound;
  j["loop"] = config.loop.to_string();
  j["fit"] = {{"g_c", fit.g_c},
              {witness ? "beta" : "alpha", fit.amplitude},
              {witness ? "delta" : "nu", fit.exponent},
              {"amplitude", fit.amplitude},
              {"exponent", fit.exponent},
              {"residual", fit.residual},
              {"valid", fit.valid()}};
  bool monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].peak.g_m < rows[i - 1].peak.g_m;
  j["monotone_approach"] = monotone;
  j["files"] = {out.file("_peaks.csv").filename().string()};
  write_json(out.file(".json"), j);
  log << "scaling: exponent " << fit.exponent << ", amplitude " << fit.amplitude << ", residual " << fit.residual
      << "\n";
  return fit.valid() ? kSuccess : kInvariantFailure;
}

int cmd_validate(const ValidateOptions& options, std::ostream& out) {
  const std::string started = utc_now();
  const auto results = run_validation(options);
  bool ok = true;
  json suites = json::array();
  for (const auto& r : results) {
    ok = ok && r.passed;
    char line[256];
    std::snprintf(line, sizeof line, "[%s] %-22s %4zu checks %3zu failures %8.2fs  ", r.passed ? "PASS" : "FAIL",
                  r.name.c_str(), r.checks, r.failures, r.seconds);
    out << line << r.detail << "\n";
    suites.push_back({{"name", r.name},
                      {"passed", r.passed},
                      {"checks", r.checks},
                      {"failures", r.failures},
                      {"detail", r.detail},
                      {"seconds", r.seconds}});
  }
  out << (ok ? "all suites passed" : "validation failed") << "\n";
  if (!options.report_path.empty()) {
    const json opts = {{"inject_fault", options.inject_fault}, {"full", options.full}};
    write_json(options.report_path, {{"tool", "topoloc"},
                                     {"version", tool_version()},
                                     {"config_hash", fnv1a_hex(opts.dump())},
                                     {"command", "validate"},
                                     {"inject_fault", options.inject_fault},
                                     {"full", options.full},
                                     {"started_at", started},
                                     {"finished_at", utc_now()},
                                     {"passed", ok},
                                     {"suites", suites}});
  }
  return ok ? kSuccess : kInvariantFailure;
}

}  // namespace topoloc::cli
