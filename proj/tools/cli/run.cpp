#include <CLI11.hpp>

#include "commands.hpp"
#include "topoloc/error.hpp"

namespace topoloc::cli {

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Localizable entanglement on topological codes: sweeps, dynamics, scaling fits and self-checks",
               "topoloc"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  std::optional<std::size_t> workers;
  std::string out_dir, loop;
  std::optional<std::uint64_t> seed;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("-c,--config", config_path, "TOML experiment config (defaults apply when omitted)");
    sub->add_option("--set", overrides, "Override a config field, e.g. --set grid.step=0.05 (TOML value syntax)");
    sub->add_option("-j,--workers", workers, "Worker threads (0: one per hardware thread)");
    sub->add_option("-o,--out-dir", out_dir, "Output directory");
    sub->add_option("--loop", loop, "Loop spec such as Lx_h, Lz_h or Lx_h_r");
    sub->add_option("--seed", seed, "Seed of the LE optimizer starts");
  };
  CLI::App* sweep = app.add_subcommand("sweep", "Bounds of the localizable entanglement over a field grid");
  CLI::App* dynamics = app.add_subcommand("dynamics", "Dephasing dynamics of E'' and E^w with collapse times");
  CLI::App* scaling = app.add_subcommand("scaling", "QPT peaks over system sizes and the finite-size fit");
  for (auto* sub : {sweep, dynamics, scaling}) add_common(sub);

  ValidateOptions vopts;
  CLI::App* validate = app.add_subcommand("validate", "Run the oracle and invariant suites");
  validate->add_flag("--inject-fault", vopts.inject_fault, "Corrupt a witness generator fixture");
  validate->add_flag("--full", vopts.full, "Include the continuous LE optimizer in the hierarchy suite");
  validate->add_option("--report", vopts.report_path, "Write a JSON report");
  validate->add_option("-j,--workers", vopts.workers, "Worker threads (0: one per hardware thread)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kSuccess;
    }
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    if (validate->parsed()) {
      if (const char* env = std::getenv("TOPOLOC_WORKERS"); env && *env && vopts.workers == 0) {
        ExperimentConfig tmp;
        apply_environment(tmp);
        vopts.workers = tmp.run.workers;
      }
      return cmd_validate(vopts, out);
    }
    if (!loop.empty()) overrides.push_back("loop.spec=\"" + loop + "\"");
    if (seed) overrides.push_back("optimizer.seed=" + std::to_string(*seed));
    if (!out_dir.empty()) overrides.push_back("output.dir=\"" + out_dir + "\"");
    ExperimentConfig config = config_path.empty() ? parse_config("", overrides) : load_config(config_path, overrides);
    apply_environment(config);
    if (workers) config.run.workers = *workers;
    if (sweep->parsed()) return cmd_sweep(config, out);
    if (dynamics->parsed()) return cmd_dynamics(config, out);
    return cmd_scaling(config, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "invalid request: " << e.what() << "\n";
    return kConfigError;
  } catch (const LimitExceeded& e) {
    err << "infeasible request: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvariantViolation& e) {
    err << "invariant violated: " << e.what() << "\n";
    return kInvariantFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kInvariantFailure;
  }
}

}  // namespace topoloc::cli
