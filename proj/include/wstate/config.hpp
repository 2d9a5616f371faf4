#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wstate/evolution.hpp"
#include "wstate/excitation_space.hpp"
#include "wstate/pulses.hpp"

namespace wstate {

/// Evenly spaced values min..max inclusive; count == 1 gives {min}.
struct ScanAxis {
  std::string name;
  double min = 0.0;
  double max = 0.0;
  std::size_t count = 1;

  std::vector<double> values() const;
};

enum class ModelKind { Full, Effective };

/// Frequencies f in MHz (angular rate 2 pi f). The time unit T is `t_us`
/// microseconds; when absent, T = 8 / Omega0.
struct PhysicalInputs {
  std::optional<double> t_us;
  std::optional<double> lambda_mhz;
  std::optional<double> v_mhz;
  std::optional<double> omega0_mhz;
  std::optional<double> gamma_mhz;
  std::optional<double> kappa_mhz;
  std::optional<double> rydberg_mhz;
};

/// Resolved run configuration. Times in units of T, rates in 1/T.
///
/// File layout (INI):
///
///   [system]      n_atoms, lambda, v
///   [pulses]      variant = stirap | paper_fit | corrected | file:<path>,
///                 omega0, duration, t0, tc, vartheta, grid, flip_omega2
///   [evolution]   model = full | effective, steps (0 = auto), record_every
///   [decoherence] gamma, kappa, rydberg_ratio
///   [scan]        omega0, kappa_over_lambda, gamma_over_lambda, delta_pulse,
///                 delta_coupling, n_atoms, each "min max count"
///   [angles]      omega0 = "4 8 16"
///   [comparison]  adiabatic_factor, short_factor, samples
///   [fit]         n_terms
///   [output]      path, workers
///   [physical]    preset = rb87, t_us, lambda_mhz, v_mhz, omega0_mhz,
///                 gamma_mhz, kappa_mhz, rydberg_mhz
struct ExperimentConfig {
  SystemLayout system;
  StirapParams stirap;
  std::string variant = "corrected";
  bool flip_omega2 = false;
  std::size_t pulse_grid = 0;  // 0 = one sample per integration step

  ModelKind model = ModelKind::Full;
  std::size_t steps = 0;  // 0 = 10^4 * lambda * duration / 80, at least 10^4
  std::size_t record_every = 10;

  DecoherenceRates rates;
  std::map<std::string, ScanAxis> axes;
  std::vector<double> angle_omega0{4.0, 8.0, 16.0};

  double short_factor = 8.0;       // T = short_factor / Omega0
  double adiabatic_factor = 35.0;  // T = adiabatic_factor / Omega0
  std::size_t comparison_samples = 251;

  int fit_terms = 2;
  std::string output;
  unsigned workers = 0;  // 0 = environment or hardware

  std::string preset;
  PhysicalInputs physical;

  /// Throws ConfigError.
  void validate() const;
  std::size_t resolved_steps() const;
  std::size_t resolved_steps(double duration) const;
  IntegratorConfig integrator() const;
  const ScanAxis& axis(const std::string& name) const;
  /// "section.key = value" lines covering every resolved field.
  std::vector<std::string> echo() const;
};

/// Reads INI text; `overrides` are "section.key=value" strings applied on top.
/// Throws ConfigError on unknown sections/keys, malformed values or invalid
/// combinations.
ExperimentConfig load_config(std::istream& in, const std::vector<std::string>& overrides = {});
ExperimentConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides = {});
ExperimentConfig default_config(const std::vector<std::string>& overrides = {});

/// Worker count: explicit flag, else WSTATE_WORKERS, else the configured
/// value, else hardware concurrency.
unsigned resolve_workers(unsigned flag, unsigned configured = 0);

}  // namespace wstate
