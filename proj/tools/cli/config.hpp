#pragma once

#include <nlohmann/json.hpp>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "topoloc/codes.hpp"

namespace topoloc::cli {

/// Schema violation or unreadable configuration. Maps to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  CodeKind kind = CodeKind::kitaev;
  std::size_t width = 2;
  std::size_t height = 2;
};

struct BoundsConfig {
  bool le = false;
  bool rle = false;
  bool e_prime = true;
  bool e_dprime = true;
  bool witness = true;
  bool normalized = false;
  std::string setup;  // empty: canonical
};

struct GridConfig {
  double start = 0.0;
  double stop = 2.0;
  double step = 0.02;
  std::vector<double> values;  // explicit list; overrides start/stop/step
  std::vector<double> refine;  // {lo, hi, step} or empty
};

struct PreferredSetConfig {
  double p_c = 1e-10;
  std::vector<double> calibration_g{0.0, 0.2};
};

struct BathConfig {
  std::vector<double> s{1.0, 3.0};
  double omega_c = 1.0;
};

struct TimeConfig {
  double t_end = 50.0;
  double dt = 1e-3;
  double record_every = 0.1;
  double threshold = 1e-8;
  std::size_t max_support = 4096;
};

struct DynamicsConfig {
  std::vector<double> g{0.1, 0.8};
};

struct ScalingConfig {
  std::vector<std::size_t> sizes{8, 12, 16, 18};
  std::string bound = "E_dprime";  // E_dprime | E_prime | E_w
  std::vector<double> refine{0.2, 0.5, 0.005};
  double max_spacing = 0.01;
  bool synthetic = false;
  double synthetic_amplitude = 0.386;
  double synthetic_exponent = 0.588;
};

struct OptimizerConfig {
  std::uint64_t seed = 0;
  std::size_t random_starts = 64;
  std::size_t pauli_seeds = 8;
  std::size_t max_evaluations = 4000;
  double tolerance = 1e-8;
  std::size_t max_measured_le = 10;
  std::size_t max_measured_rle = 12;
};

struct OutputConfig {
  std::string dir = ".";
  std::string prefix;  // defaults to the subcommand name
};

struct RunConfig {
  std::size_t workers = 0;  // 0: one per hardware thread
  std::size_t max_qubits = 20;
};

struct ExperimentConfig {
  ModelConfig model;
  LoopSpec loop;
  std::vector<std::size_t> part_a;  // 1-based labels; empty: witness hub or first loop qubit
  BoundsConfig bounds;
  GridConfig grid;
  PreferredSetConfig preferred_set;
  BathConfig bath;
  TimeConfig time;
  DynamicsConfig dynamics;
  ScalingConfig scaling;
  OptimizerConfig optimizer;
  OutputConfig output;
  RunConfig run;

  /// Every field, resolved, in a stable key order.
  nlohmann::json to_json() const;
  /// FNV-1a 64 of the compact to_json() dump, as 16 hex digits.
  std::string hash() const;
  CodeLattice lattice() const;
  std::vector<double> g_grid() const;
};

/// Parses TOML text. overrides are "section.key=value" assignments whose
/// value is TOML syntax. Unknown sections or keys are errors.
ExperimentConfig parse_config(const std::string& toml_text, const std::vector<std::string>& overrides = {},
                              const std::string& source = "<config>");
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides = {});

/// Applies TOPOLOC_WORKERS when set. Malformed values are config errors.
void apply_environment(ExperimentConfig& config);

std::string fnv1a_hex(const std::string& bytes);

}  // namespace topoloc::cli
