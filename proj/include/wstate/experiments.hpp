#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <iosfwd>
#include <string>
#include <thread>
#include <vector>

#include "wstate/config.hpp"
#include "wstate/evolution.hpp"
#include "wstate/hamiltonian.hpp"
#include "wstate/pulses.hpp"

namespace wstate {

/// Numeric CSV table. An optional leading text column (`label_column`) and a
/// trailing status column ("ok" or a diagnostic) are written when present.
struct Table {
  std::string label_column;
  std::vector<std::string> columns;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> status;
  std::vector<std::string> notes;

  void add(std::vector<double> row, std::string state = "ok", std::string label = {});
  std::size_t failures() const;
  /// Index of a numeric column; throws std::out_of_range.
  std::size_t column(const std::string& name) const;
};

/// `#`-prefixed header (command, resolved config, notes), then the table.
void write_table(std::ostream& out, const ExperimentConfig& config, const std::string& command, const Table& table);

/// Runs fn(i) for i in [0, count) on up to `workers` threads. The first
/// exception thrown by fn is rethrown after all workers join.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
  const unsigned n = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      if (failed) return;
      try {
        fn(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  if (n == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned w = 0; w < n; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
}

/// Effective-frame pulses selected by `config.variant`. Corrected pulses are
/// sampled on `config.pulse_grid` intervals (the step count when zero).
PulseSet make_pulses(const ExperimentConfig& config);
/// Uncorrected sequence built from the [pulses] parameters.
PulseSet adiabatic_pulses(const ExperimentConfig& config);
PulseSet corrected_from(const ExperimentConfig& config, const StirapParams& params);

struct ModelRun {
  Trajectory trajectory;
  std::vector<std::string> labels;
  bool open = false;

  double fidelity() const { return trajectory.final_fidelity(); }
};

/// Evolves |psi1> under `pulses` in the configured model. The pulses are
/// mapped to physical amplitudes with the frame of `config.system`, while
/// the couplings come from `layout` (which may be perturbed). Nonzero rates
/// (or `force_open`) switch to the Lindblad engine on the vacuum-extended basis.
ModelRun run_model(const ExperimentConfig& config, const PulseSet& pulses, const SystemLayout& layout,
                   const DecoherenceRates& rates, const IntegratorConfig& integrator, bool force_open = false);
ModelRun run_model(const ExperimentConfig& config, const PulseSet& pulses);

/// Single evolution with the configured pulses; trajectory table.
Table evolve(const ExperimentConfig& config, ModelRun* run = nullptr);

/// t, theta1_<o>, theta2_<o> for each angles.omega0 value.
Table run_angles(const ExperimentConfig& config);
/// omega0, F over scan.omega0.
Table run_amplitude_scan(const ExperimentConfig& config, unsigned workers);
/// t_over_T, F_super_short, F_adiabatic_short, F_adiabatic_long.
Table run_time_comparison(const ExperimentConfig& config);
/// kappa_over_lambda, gamma_over_lambda, F.
Table run_decoherence_map(const ExperimentConfig& config, unsigned workers);
/// panel (pulse | coupling), delta_a, delta_b, F.
Table run_robustness(const ExperimentConfig& config, unsigned workers);
/// N, s1, s2_numeric, s2_printed, s2_agrees, vartheta, F_eff.
Table run_n_scaling(const ExperimentConfig& config);

struct FitOutcome {
  FitReport omega1;
  FitReport omega2;
  double fidelity_corrected = 0.0;
  double fidelity_fit = 0.0;
  double fidelity_fit_flipped = 0.0;  // omega2 amplitudes negated
  double fidelity_reference = 0.0;
  double fidelity_reference_flipped = 0.0;
};

/// Two-sided loop: fit the corrected pulses with `fit.n_terms` Gaussians each,
/// then evolve the fits and the printed fit parameters (both omega2 signs).
FitOutcome fit_corrected_pulses(const ExperimentConfig& config);
/// key, value rows.
Table fit_table(const FitOutcome& outcome);

/// Final mixing angle that makes cos(theta1(T)) = 1 / sqrt(N).
double vartheta_for(int n_atoms);

}  // namespace wstate
