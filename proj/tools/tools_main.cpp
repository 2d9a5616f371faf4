#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "wstate/config.hpp"
#include "wstate/errors.hpp"
#include "wstate/experiments.hpp"

using namespace wstate;

namespace {

struct CommonOptions {
  std::string config_path;
  std::vector<std::string> overrides;
  std::string output;
  unsigned workers = 0;
};

ExperimentConfig resolve(const CommonOptions& o) {
  ExperimentConfig cfg = o.config_path.empty() ? default_config(o.overrides) : load_config_file(o.config_path, o.overrides);
  if (!o.output.empty()) cfg.output = o.output;
  return cfg;
}

void emit(const ExperimentConfig& cfg, const std::string& command, const Table& table) {
  if (cfg.output.empty() || cfg.output == "-") {
    write_table(std::cout, cfg, command, table);
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw ConfigError("cannot write '" + cfg.output + "'");
  write_table(out, cfg, command, table);
  if (!out) throw ConfigError("write to '" + cfg.output + "' failed");
  std::cerr << command << ": wrote " << table.rows.size() << " rows to " << cfg.output << '\n';
}

void report_failures(const std::string& command, const Table& table) {
  if (table.failures()) std::cerr << command << ": " << table.failures() << " cells failed (status column)\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superadiabatic W-state preparation in a cavity/fiber superatom network"};
  app.require_subcommand(1);
  CommonOptions opts;
  std::string preset_out;

  std::map<std::string, std::function<void()>> actions;
  auto add = [&](const std::string& name, const std::string& help, std::function<void()> action) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("-c,--config", opts.config_path, "INI config file")->check(CLI::ExistingFile);
    sub->add_option("--set", opts.overrides, "Override, section.key=value (repeatable)");
    sub->add_option("-o,--output", opts.output, "Output CSV path (stdout when omitted)");
    sub->add_option("-j,--workers", opts.workers, "Worker threads (overrides WSTATE_WORKERS)");
    actions[name] = std::move(action);
    return sub;
  };

  add("angles", "Mixing angles theta1, theta2 versus time", [&] {
    const auto cfg = resolve(opts);
    emit(cfg, "angles", run_angles(cfg));
  });
  add("amplitude-scan", "Final fidelity versus Omega0", [&] {
    const auto cfg = resolve(opts);
    const Table t = run_amplitude_scan(cfg, resolve_workers(opts.workers, cfg.workers));
    emit(cfg, "amplitude-scan", t);
    report_failures("amplitude-scan", t);
  });
  add("evolve", "Single trajectory with populations", [&] {
    const auto cfg = resolve(opts);
    ModelRun run;
    const Table t = evolve(cfg, &run);
    emit(cfg, "evolve", t);
    std::cerr << "evolve: F(T) = " << run.fidelity() << '\n';
  });
  add("time-comparison", "Superadiabatic versus adiabatic fidelity over normalized time", [&] {
    const auto cfg = resolve(opts);
    emit(cfg, "time-comparison", run_time_comparison(cfg));
  });
  add("decoherence-map", "Final fidelity over kappa/lambda and gamma/lambda", [&] {
    const auto cfg = resolve(opts);
    const Table t = run_decoherence_map(cfg, resolve_workers(opts.workers, cfg.workers));
    emit(cfg, "decoherence-map", t);
    report_failures("decoherence-map", t);
  });
  add("robustness", "Fidelity under pulse-amplitude and coupling fluctuations", [&] {
    const auto cfg = resolve(opts);
    const Table t = run_robustness(cfg, resolve_workers(opts.workers, cfg.workers));
    emit(cfg, "robustness", t);
    report_failures("robustness", t);
  });
  CLI::App* fit = add("fit-pulses", "Gaussian-sum fit of the corrected pulses", [&] {
    const auto cfg = resolve(opts);
    const FitOutcome outcome = fit_corrected_pulses(cfg);
    emit(cfg, "fit-pulses", fit_table(outcome));
    if (!preset_out.empty()) {
      std::ofstream out(preset_out);
      if (!out) throw ConfigError("cannot write '" + preset_out + "'");
      write_preset(out, outcome.omega1.params, outcome.omega2.params, cfg.stirap.duration);
    }
  });
  fit->add_option("--preset-out", preset_out, "Also write the fitted pulses as a preset file");
  add("n-scaling", "Effective-frame couplings and fidelity versus N", [&] {
    const auto cfg = resolve(opts);
    emit(cfg, "n-scaling", run_n_scaling(cfg));
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ConfigError::exit_code;
  }

  try {
    for (const auto* sub : app.get_subcommands()) actions.at(sub->get_name())();
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ConfigError::exit_code;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return NumericalError::exit_code;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ConfigError::exit_code;
  } catch (const std::domain_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return ConfigError::exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
