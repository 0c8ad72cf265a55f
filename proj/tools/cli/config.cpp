#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "topoloc/error.hpp"
#include "topoloc/qpt.hpp"

namespace topoloc::cli {

namespace {

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"model", {"kind", "width", "height"}},
      {"loop", {"spec"}},
      {"bipartition", {"part_a"}},
      {"bounds", {"le", "rle", "e_prime", "e_dprime", "witness", "normalized", "setup"}},
      {"grid", {"start", "stop", "step", "values", "refine"}},
      {"preferred_set", {"p_c", "calibration_g"}},
      {"bath", {"s", "omega_c"}},
      {"time", {"t_end", "dt", "record_every", "threshold", "max_support"}},
      {"dynamics", {"g"}},
      {"scaling", {"sizes", "bound", "refine", "max_spacing", "synthetic", "synthetic_amplitude",
                   "synthetic_exponent"}},
      {"optimizer", {"seed", "random_starts", "pauli_seeds", "max_evaluations", "tolerance", "max_measured_le",
                     "max_measured_rle"}},
      {"output", {"dir", "prefix"}},
      {"run", {"workers", "max_qubits"}},
  };
  return s;
}

std::string where(const std::string& section, const std::string& key) { return section + "." + key; }

class Reader {
 public:
  Reader(const toml::table& root, std::string section) : section_(std::move(section)) {
    if (const auto* t = root.get(section_)) {
      table_ = t->as_table();
      if (!table_) throw ConfigError("[" + section_ + "] must be a table");
    }
  }

  const toml::node* node(const std::string& key) const { return table_ ? table_->get(key) : nullptr; }

  void get(const std::string& key, bool& out) const {
    if (const auto* n = node(key)) {
      auto v = n->value<bool>();
      if (!n->is_boolean() || !v) throw ConfigError(where(section_, key) + " must be a boolean");
      out = *v;
    }
  }
  void get(const std::string& key, double& out) const {
    if (const auto* n = node(key)) out = number(*n, key);
  }
  void get(const std::string& key, std::size_t& out) const {
    if (const auto* n = node(key)) out = count(*n, key);
  }
  void get(const std::string& key, std::uint64_t& out, int) const {
    if (const auto* n = node(key)) out = count(*n, key);
  }
  void get(const std::string& key, std::string& out) const {
    if (const auto* n = node(key)) {
      if (!n->is_string()) throw ConfigError(where(section_, key) + " must be a string");
      out = *n->value<std::string>();
    }
  }
  void get(const std::string& key, std::vector<double>& out) const {
    if (const auto* n = node(key)) {
      out.clear();
      if (const auto* a = n->as_array()) {
        for (const auto& e : *a) out.push_back(number(e, key));
      } else {
        out.push_back(number(*n, key));
      }
    }
  }
  void get(const std::string& key, std::vector<std::size_t>& out) const {
    if (const auto* n = node(key)) {
      out.clear();
      if (const auto* a = n->as_array()) {
        for (const auto& e : *a) out.push_back(count(e, key));
      } else {
        out.push_back(count(*n, key));
      }
    }
  }

 private:
  double number(const toml::node& n, const std::string& key) const {
    if (n.is_floating_point()) return *n.value<double>();
    if (n.is_integer()) return static_cast<double>(*n.value<std::int64_t>());
    throw ConfigError(where(section_, key) + " must be a number");
  }
  std::size_t count(const toml::node& n, const std::string& key) const {
    if (!n.is_integer() || *n.value<std::int64_t>() < 0) {
      throw ConfigError(where(section_, key) + " must be a non-negative integer");
    }
    return static_cast<std::size_t>(*n.value<std::int64_t>());
  }

  std::string section_;
  const toml::table* table_ = nullptr;
};

void check_keys(const toml::table& root) {
  for (const auto& [k, v] : root) {
    const std::string section(k.str());
    auto it = schema().find(section);
    if (it == schema().end()) throw ConfigError("unknown section [" + section + "]");
    const auto* t = v.as_table();
    if (!t) throw ConfigError("[" + section + "] must be a table");
    for (const auto& [kk, vv] : *t) {
      if (!it->second.count(std::string(kk.str()))) {
        throw ConfigError("unknown key " + where(section, std::string(kk.str())));
      }
    }
  }
}

void merge(toml::table& into, const toml::table& from) {
  for (const auto& [k, v] : from) {
    auto* dst = into.get(k);
    if (dst && dst->is_table() && v.is_table()) {
      merge(*dst->as_table(), *v.as_table());
    } else {
      into.insert_or_assign(k, v);
    }
  }
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

void validate(const ExperimentConfig& c) {
  require(c.model.width >= 2 && c.model.height >= 2, "model.width and model.height must be at least 2");
  const auto grid = c.g_grid();
  require(!grid.empty(), "grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require(grid[i] >= 0.0, "grid values must be non-negative");
    require(i == 0 || grid[i] > grid[i - 1], "grid values must be strictly increasing");
  }
  require(c.grid.refine.empty() || c.grid.refine.size() == 3, "grid.refine must be [lo, hi, step]");
  require(c.preferred_set.p_c > 0.0 && c.preferred_set.p_c < 1.0, "preferred_set.p_c must lie in (0, 1)");
  require(!c.preferred_set.calibration_g.empty(), "preferred_set.calibration_g must not be empty");
  for (double g : c.preferred_set.calibration_g) require(g >= 0.0, "preferred_set.calibration_g must be >= 0");
  require(!c.bath.s.empty(), "bath.s must not be empty");
  for (double s : c.bath.s) require(s > 0.0, "bath.s values must be positive");
  require(c.bath.omega_c > 0.0, "bath.omega_c must be positive");
  require(c.time.dt > 0.0 && c.time.t_end >= 0.0, "time.dt must be positive and time.t_end non-negative");
  require(c.time.record_every >= c.time.dt, "time.record_every must be at least time.dt");
  const double ratio = c.time.record_every / c.time.dt;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio, "time.record_every must be a multiple of time.dt");
  require(c.time.threshold >= 0.0, "time.threshold must be non-negative");
  require(!c.dynamics.g.empty(), "dynamics.g must not be empty");
  for (double g : c.dynamics.g) require(g >= 0.0, "dynamics.g values must be non-negative");
  require(c.scaling.bound == "E_dprime" || c.scaling.bound == "E_prime" || c.scaling.bound == "E_w",
          "scaling.bound must be E_dprime, E_prime or E_w");
  require(c.scaling.refine.empty() || c.scaling.refine.size() == 3, "scaling.refine must be [lo, hi, step]");
  require(c.scaling.max_spacing > 0.0, "scaling.max_spacing must be positive");
  require(c.optimizer.tolerance > 0.0, "optimizer.tolerance must be positive");
  require(c.run.max_qubits >= 1 && c.run.max_qubits <= 30, "run.max_qubits must lie in [1, 30]");
  for (auto q : c.part_a) require(q >= 1, "bipartition.part_a uses 1-based qubit labels");
}

}  // namespace

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["model"] = {{"kind", to_string(model.kind)}, {"width", model.width}, {"height", model.height}};
  j["loop"] = {{"spec", loop.to_string()}};
  j["bipartition"] = {{"part_a", part_a}};
  j["bounds"] = {{"le", bounds.le},           {"rle", bounds.rle},
                 {"e_prime", bounds.e_prime}, {"e_dprime", bounds.e_dprime},
                 {"witness", bounds.witness}, {"normalized", bounds.normalized},
                 {"setup", bounds.setup}};
  j["grid"] = {{"start", grid.start}, {"stop", grid.stop}, {"step", grid.step},
               {"values", grid.values}, {"refine", grid.refine}};
  j["preferred_set"] = {{"p_c", preferred_set.p_c}, {"calibration_g", preferred_set.calibration_g}};
  j["bath"] = {{"s", bath.s}, {"omega_c", bath.omega_c}};
  j["time"] = {{"t_end", time.t_end},
               {"dt", time.dt},
               {"record_every", time.record_every},
               {"threshold", time.threshold},
               {"max_support", time.max_support}};
  j["dynamics"] = {{"g", dynamics.g}};
  j["scaling"] = {{"sizes", scaling.sizes},
                  {"bound", scaling.bound},
                  {"refine", scaling.refine},
                  {"max_spacing", scaling.max_spacing},
                  {"synthetic", scaling.synthetic},
                  {"synthetic_amplitude", scaling.synthetic_amplitude},
                  {"synthetic_exponent", scaling.synthetic_exponent}};
  j["optimizer"] = {{"seed", optimizer.seed},
                    {"random_starts", optimizer.random_starts},
                    {"pauli_seeds", optimizer.pauli_seeds},
                    {"max_evaluations", optimizer.max_evaluations},
                    {"tolerance", optimizer.tolerance},
                    {"max_measured_le", optimizer.max_measured_le},
                    {"max_measured_rle", optimizer.max_measured_rle}};
  j["output"] = {{"dir", output.dir}, {"prefix", output.prefix}};
  j["run"] = {{"workers", run.workers}, {"max_qubits", run.max_qubits}};
  return j;
}

std::string ExperimentConfig::hash() const {
  // Output location and worker count do not change the numbers.
  nlohmann::json j = to_json();
  j.erase("output");
  j["run"].erase("workers");
  return fnv1a_hex(j.dump());
}

CodeLattice ExperimentConfig::lattice() const {
  try {
    return model.kind == CodeKind::kitaev ? build_kitaev(model.width, model.height)
                                          : build_color(model.width, model.height);
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
}

std::vector<double> ExperimentConfig::g_grid() const {
  if (!grid.values.empty()) return grid.values;
  try {
    auto g = uniform_grid(grid.start, grid.stop, grid.step);
    if (grid.refine.size() == 3) g = refine_grid(std::move(g), grid.refine[0], grid.refine[1], grid.refine[2]);
    return g;
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("grid: ") + e.what());
  }
}

ExperimentConfig parse_config(const std::string& toml_text, const std::vector<std::string>& overrides,
                              const std::string& source) {
  toml::table root;
  try {
    root = toml::parse(std::string_view(toml_text), std::string_view(source));
    for (const auto& o : overrides) {
      const auto eq = o.find('=');
      if (eq == std::string::npos || o.find('.') > eq) {
        throw ConfigError("override '" + o + "' must look like section.key=value");
      }
      merge(root, toml::parse(std::string_view(o), std::string_view("<override>")));
    }
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "TOML parse error in " << source << ": " << e.description() << " (line " << e.source().begin.line << ")";
    throw ConfigError(os.str());
  }
  check_keys(root);

  ExperimentConfig c;
  {
    Reader r(root, "model");
    std::string kind = "kitaev";
    r.get("kind", kind);
    try {
      c.model.kind = code_kind_from_string(kind);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("model.kind: ") + e.what());
    }
    r.get("width", c.model.width);
    r.get("height", c.model.height);
  }
  {
    Reader r(root, "loop");
    std::string spec = c.model.kind == CodeKind::kitaev ? "Lx_h" : "Lx_h_r";
    r.get("spec", spec);
    try {
      c.loop = LoopSpec::parse(spec);
    } catch (const InvalidArgument& e) {
      throw ConfigError(std::string("loop.spec: ") + e.what());
    }
    if ((c.model.kind == CodeKind::color) != c.loop.color.has_value()) {
      throw ConfigError("loop.spec '" + spec + "' does not fit a " + to_string(c.model.kind) + " lattice");
    }
  }
  Reader(root, "bipartition").get("part_a", c.part_a);
  {
    Reader r(root, "bounds");
    r.get("le", c.bounds.le);
    r.get("rle", c.bounds.rle);
    r.get("e_prime", c.bounds.e_prime);
    r.get("e_dprime", c.bounds.e_dprime);
    r.get("witness", c.bounds.witness);
    r.get("normalized", c.bounds.normalized);
    r.get("setup", c.bounds.setup);
  }
  {
    Reader r(root, "grid");
    r.get("start", c.grid.start);
    r.get("stop", c.grid.stop);
    r.get("step", c.grid.step);
    r.get("values", c.grid.values);
    r.get("refine", c.grid.refine);
  }
  {
    Reader r(root, "preferred_set");
    r.get("p_c", c.preferred_set.p_c);
    r.get("calibration_g", c.preferred_set.calibration_g);
  }
  {
    Reader r(root, "bath");
    r.get("s", c.bath.s);
    r.get("omega_c", c.bath.omega_c);
  }
  {
    Reader r(root, "time");
    r.get("t_end", c.time.t_end);
    r.get("dt", c.time.dt);
    r.get("record_every", c.time.record_every);
    r.get("threshold", c.time.threshold);
    r.get("max_support", c.time.max_support);
  }
  Reader(root, "dynamics").get("g", c.dynamics.g);
  {
    Reader r(root, "scaling");
    r.get("sizes", c.scaling.sizes);
    r.get("bound", c.scaling.bound);
    r.get("refine", c.scaling.refine);
    r.get("max_spacing", c.scaling.max_spacing);
    r.get("synthetic", c.scaling.synthetic);
    r.get("synthetic_amplitude", c.scaling.synthetic_amplitude);
    r.get("synthetic_exponent", c.scaling.synthetic_exponent);
  }
  {
    Reader r(root, "optimizer");
    r.get("seed", c.optimizer.seed, 0);
    r.get("random_starts", c.optimizer.random_starts);
    r.get("pauli_seeds", c.optimizer.pauli_seeds);
    r.get("max_evaluations", c.optimizer.max_evaluations);
    r.get("tolerance", c.optimizer.tolerance);
    r.get("max_measured_le", c.optimizer.max_measured_le);
    r.get("max_measured_rle", c.optimizer.max_measured_rle);
  }
  {
    Reader r(root, "output");
    r.get("dir", c.output.dir);
    r.get("prefix", c.output.prefix);
  }
  {
    Reader r(root, "run");
    r.get("workers", c.run.workers);
    r.get("max_qubits", c.run.max_qubits);
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides, path);
}

void apply_environment(ExperimentConfig& config) {
  const char* env = std::getenv("TOPOLOC_WORKERS");
  if (!env || !*env) return;
  char* end = nullptr;
  const long long v = std::strtoll(env, &end, 10);
  if (*end != '\0' || v < 0) throw ConfigError(std::string("TOPOLOC_WORKERS must be a non-negative integer, got '") +
                                               env + "'");
  config.run.workers = static_cast<std::size_t>(v);
}

}  // namespace topoloc::cli
