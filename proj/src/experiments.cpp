#include "wstate/experiments.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wstate/errors.hpp"
#include "wstate/excitation_space.hpp"
#include "wstate/superadiabatic.hpp"

namespace wstate {

namespace {

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string number(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(12) << x;
  return os.str();
}

std::string one_line(std::string s) {
  for (char& c : s) {
    if (c == '\n' || c == '\r' || c == ',') c = ';';
  }
  return s;
}

// H(t) = H_static + Omega_1(t) D_1 + Omega(t) D_rest with precomputed parts.
HamiltonianSource full_source(const Basis& basis, const PulseSet& pulses, const EffectiveFrame& frame) {
  const int n = basis.layout().n_atoms;
  std::vector<double> first(n, 0.0), rest(n, 1.0);
  first[0] = 1.0;
  rest[0] = 0.0;
  Eigen::MatrixXcd fixed = build_static(basis).matrix;
  Eigen::MatrixXcd d1 = build_drive(basis, first).matrix / frame.s1;
  Eigen::MatrixXcd d2 = build_drive(basis, rest).matrix / frame.s2;
  return [fixed = std::move(fixed), d1 = std::move(d1), d2 = std::move(d2), pulses](double t) {
    return Eigen::MatrixXcd(fixed + pulses.omega1(t) * d1 + pulses.omega2(t) * d2);
  };
}

HamiltonianSource effective_source(const PulseSet& pulses) {
  return [pulses](double t) { return Eigen::MatrixXcd(effective_hamiltonian(pulses, t)); };
}

StirapParams params_with_omega0(const ExperimentConfig& config, double omega0) {
  StirapParams p = config.stirap;
  p.omega0 = omega0;
  return p;
}

std::string fmt_tag(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

// --- tables --------------------------------------------------------------

void Table::add(std::vector<double> row, std::string state, std::string label) {
  if (row.size() != columns.size()) throw std::logic_error("table row width mismatch");
  rows.push_back(std::move(row));
  status.push_back(one_line(std::move(state)));
  labels.push_back(std::move(label));
}

std::size_t Table::failures() const {
  return static_cast<std::size_t>(std::count_if(status.begin(), status.end(), [](const auto& s) { return s != "ok"; }));
}

std::size_t Table::column(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::out_of_range("no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

void write_table(std::ostream& out, const ExperimentConfig& config, const std::string& command, const Table& table) {
  out << "# wstate " << command << '\n';
  for (const auto& line : config.echo()) out << "# " << line << '\n';
  for (const auto& note : table.notes) out << "# " << note << '\n';
  const bool labelled = !table.label_column.empty();
  const bool with_status = table.failures() > 0;
  if (labelled) out << table.label_column << ',';
  for (std::size_t j = 0; j < table.columns.size(); ++j) out << (j ? "," : "") << table.columns[j];
  if (with_status) out << ",status";
  out << '\n';
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    if (labelled) out << table.labels[i] << ',';
    for (std::size_t j = 0; j < table.rows[i].size(); ++j) out << (j ? "," : "") << number(table.rows[i][j]);
    if (with_status) out << ',' << table.status[i];
    out << '\n';
  }
}

// --- pulses and models -----------------------------------------------------

PulseSet adiabatic_pulses(const ExperimentConfig& config) { return stirap_pulses(config.stirap); }

PulseSet corrected_from(const ExperimentConfig& config, const StirapParams& params) {
  const std::size_t intervals = config.pulse_grid ? config.pulse_grid : config.resolved_steps(params.duration);
  const auto grid = uniform_grid(params.duration, intervals);
  return corrected_pulses(stirap_pulses(params), grid).pulses;
}

PulseSet make_pulses(const ExperimentConfig& config) {
  const std::string& v = config.variant;
  if (v == "stirap") return adiabatic_pulses(config);
  if (v == "paper_fit") return reference_fit_pulses(config.stirap.duration, config.flip_omega2);
  if (v == "corrected") return corrected_from(config, config.stirap);
  if (v.rfind("file:", 0) == 0) return read_preset_file(v.substr(5)).make();
  throw ConfigError("unknown pulse variant '" + v + "'");
}

ModelRun run_model(const ExperimentConfig& config, const PulseSet& pulses, const SystemLayout& layout,
                   const DecoherenceRates& rates, const IntegratorConfig& integrator, bool force_open) {
  ModelRun run;
  const double duration = pulses.duration();
  if (config.model == ModelKind::Effective) {
    if (!rates.zero() || force_open) throw ConfigError("decoherence needs the full model");
    StateVector psi0 = StateVector::Zero(3);
    psi0(0) = 1.0;
    const StateVector target = effective_w_target(layout.n_atoms);
    run.labels = {"psi1", "phi", "Psi"};
    run.trajectory = evolve_schrodinger(effective_source(pulses), psi0, target, duration, integrator);
    return run;
  }

  const EffectiveFrame frame = effective_frame(Basis(config.system, false));
  run.open = force_open || !rates.zero();
  const Basis basis(layout, run.open);
  const HamiltonianSource h = full_source(basis, pulses, frame);
  const StateVector psi0 = initial_state(basis);
  const StateVector target = w_target(basis);
  run.labels = basis.labels();
  if (!run.open) {
    run.trajectory = evolve_schrodinger(h, psi0, target, duration, integrator);
  } else {
    const DensityMatrix rho0 = psi0 * psi0.adjoint();
    run.trajectory = evolve_lindblad(h, collapse_channels(basis, rates), rho0, target, duration, integrator);
  }
  return run;
}

ModelRun run_model(const ExperimentConfig& config, const PulseSet& pulses) {
  IntegratorConfig integrator = config.integrator();
  integrator.steps = config.resolved_steps(pulses.duration());
  return run_model(config, pulses, config.system, config.rates, integrator);
}

Table evolve(const ExperimentConfig& config, ModelRun* out) {
  ModelRun run = run_model(config, make_pulses(config));
  Table table;
  table.columns = {"t", "F"};
  table.columns.insert(table.columns.end(), run.labels.begin(), run.labels.end());
  const Trajectory& tr = run.trajectory;
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    std::vector<double> row{tr.times[i], tr.fidelity[i]};
    row.insert(row.end(), tr.populations[i].begin(), tr.populations[i].end());
    table.add(std::move(row));
  }
  table.notes.push_back("final_fidelity = " + number(run.fidelity()));
  if (run.open) {
    table.notes.push_back("trace_drift = " + number(tr.trace_drift));
    table.notes.push_back("min_eigenvalue = " + number(tr.min_eigenvalue));
    table.notes.push_back("hermiticity_drift = " + number(tr.hermiticity_drift));
  } else {
    table.notes.push_back("norm_drift = " + number(tr.norm_drift));
  }
  if (out) *out = std::move(run);
  return table;
}

// --- experiments -----------------------------------------------------------

Table run_angles(const ExperimentConfig& config) {
  const std::size_t intervals = config.pulse_grid ? config.pulse_grid : 1000;
  const auto grid = uniform_grid(config.stirap.duration, intervals);
  Table table;
  table.columns = {"t"};
  std::vector<AngleSchedule> curves;
  for (double o : config.angle_omega0) {
    curves.push_back(compute_angles(stirap_pulses(params_with_omega0(config, o)), grid));
    table.columns.push_back("theta1_" + fmt_tag(o));
    table.columns.push_back("theta2_" + fmt_tag(o));
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<double> row{grid[i]};
    for (const auto& c : curves) {
      row.push_back(c.theta1[i]);
      row.push_back(c.theta2[i]);
    }
    table.add(std::move(row));
  }
  for (std::size_t k = 0; k < curves.size(); ++k) {
    const auto& c = curves[k];
    table.notes.push_back("omega0 = " + fmt_tag(config.angle_omega0[k]) + ": theta1(0) = " + number(c.theta1.front()) +
                          ", theta1(T) = " + number(c.theta1.back()) + ", theta2(0) = " + number(c.theta2.front()) +
                          ", theta2(T) = " + number(c.theta2.back()));
    if (c.rising_samples) {
      table.notes.push_back("omega0 = " + fmt_tag(config.angle_omega0[k]) + ": " + std::to_string(c.rising_samples) +
                            " samples with theta1_dot > 0");
    }
  }
  return table;
}

Table run_amplitude_scan(const ExperimentConfig& config, unsigned workers) {
  const auto values = config.axis("omega0").values();
  std::vector<double> fidelity(values.size(), kNaN);
  std::vector<std::string> state(values.size(), "ok");
  parallel_for(values.size(), workers, [&](std::size_t i) {
    try {
      ExperimentConfig cell = config;
      cell.stirap.omega0 = values[i];
      fidelity[i] = run_model(cell, make_pulses(cell)).fidelity();
    } catch (const std::exception& e) {
      state[i] = e.what();
    }
  });
  Table table;
  table.columns = {"omega0", "F"};
  for (std::size_t i = 0; i < values.size(); ++i) table.add({values[i], fidelity[i]}, state[i]);
  return table;
}

Table run_time_comparison(const ExperimentConfig& config) {
  const double omega0 = config.stirap.omega0;
  const std::size_t segments = config.comparison_samples - 1;

  auto run = [&](double duration, bool corrected) {
    StirapParams p = config.stirap;
    p.duration = duration;
    ExperimentConfig cell = config;
    cell.stirap = p;
    IntegratorConfig integrator = cell.integrator();
    const std::size_t steps = cell.resolved_steps(duration);
    integrator.steps = (steps + segments - 1) / segments * segments;
    integrator.record_every = integrator.steps / segments;
    cell.steps = integrator.steps;
    const PulseSet pulses = corrected ? corrected_from(cell, p) : stirap_pulses(p);
    return run_model(cell, pulses, cell.system, cell.rates, integrator).trajectory;
  };

  const double short_t = config.short_factor / omega0;
  const double long_t = config.adiabatic_factor / omega0;
  const Trajectory super_short = run(short_t, true);
  const Trajectory adiabatic_short = run(short_t, false);
  const Trajectory adiabatic_long = run(long_t, false);

  Table table;
  table.columns = {"t_over_T", "F_super_short", "F_adiabatic_short", "F_adiabatic_long"};
  for (std::size_t i = 0; i <= segments; ++i) {
    table.add({static_cast<double>(i) / segments, super_short.fidelity[i], adiabatic_short.fidelity[i],
               adiabatic_long.fidelity[i]});
  }
  table.notes.push_back("short duration = " + number(short_t) + ", long duration = " + number(long_t));
  return table;
}

Table run_decoherence_map(const ExperimentConfig& config, unsigned workers) {
  if (config.model != ModelKind::Full) throw ConfigError("decoherence-map needs evolution.model = full");
  const auto kappas = config.axis("kappa_over_lambda").values();
  const auto gammas = config.axis("gamma_over_lambda").values();
  const PulseSet pulses = make_pulses(config);
  IntegratorConfig integrator = config.integrator();
  integrator.steps = config.resolved_steps(pulses.duration());
  integrator.record_every = integrator.steps;

  const std::size_t cells = kappas.size() * gammas.size();
  std::vector<double> fidelity(cells, kNaN);
  std::vector<std::string> state(cells, "ok");
  parallel_for(cells, workers, [&](std::size_t c) {
    const std::size_t i = c / gammas.size();
    const std::size_t j = c % gammas.size();
    try {
      DecoherenceRates rates = config.rates;
      rates.kappa = kappas[i] * config.system.lambda;
      rates.gamma = gammas[j] * config.system.lambda;
      fidelity[c] = run_model(config, pulses, config.system, rates, integrator, true).fidelity();
    } catch (const std::exception& e) {
      state[c] = e.what();
    }
  });
  Table table;
  table.columns = {"kappa_over_lambda", "gamma_over_lambda", "F"};
  for (std::size_t c = 0; c < cells; ++c) {
    table.add({kappas[c / gammas.size()], gammas[c % gammas.size()], fidelity[c]}, state[c]);
  }
  return table;
}

Table run_robustness(const ExperimentConfig& config, unsigned workers) {
  const auto dp = config.axis("delta_pulse").values();
  const auto dc = config.axis("delta_coupling").values();
  const PulseSet pulses = make_pulses(config);
  IntegratorConfig integrator = config.integrator();
  integrator.steps = config.resolved_steps(pulses.duration());
  integrator.record_every = integrator.steps;

  const std::size_t pulse_cells = dp.size() * dp.size();
  const std::size_t cells = pulse_cells + dc.size() * dc.size();
  std::vector<double> fidelity(cells, kNaN), da(cells), db(cells);
  std::vector<std::string> state(cells, "ok");
  parallel_for(cells, workers, [&](std::size_t c) {
    const bool pulse_panel = c < pulse_cells;
    const auto& axis = pulse_panel ? dp : dc;
    const std::size_t local = pulse_panel ? c : c - pulse_cells;
    da[c] = axis[local / axis.size()];
    db[c] = axis[local % axis.size()];
    try {
      if (pulse_panel) {
        fidelity[c] = run_model(config, pulses.scaled(da[c], db[c]), config.system, config.rates, integrator).fidelity();
      } else {
        SystemLayout layout = config.system;
        layout.lambda *= 1.0 + da[c];
        layout.v *= 1.0 + db[c];
        fidelity[c] = run_model(config, pulses, layout, config.rates, integrator).fidelity();
      }
    } catch (const std::exception& e) {
      state[c] = e.what();
    }
  });
  Table table;
  table.label_column = "panel";
  table.columns = {"delta_a", "delta_b", "F"};
  double low_pulse = 1.0, low_coupling = 1.0;
  for (std::size_t c = 0; c < cells; ++c) {
    const bool pulse_panel = c < pulse_cells;
    table.add({da[c], db[c], fidelity[c]}, state[c], pulse_panel ? "pulse" : "coupling");
    double& low = pulse_panel ? low_pulse : low_coupling;
    if (!std::isnan(fidelity[c])) low = std::min(low, fidelity[c]);
  }
  table.notes.push_back("pulse panel: delta_a scales Omega~1, delta_b scales Omega~2; minimum F = " + number(low_pulse));
  table.notes.push_back("coupling panel: delta_a scales lambda, delta_b scales v; minimum F = " + number(low_coupling));
  return table;
}

double vartheta_for(int n_atoms) { return -std::atan(std::sqrt(static_cast<double>(n_atoms) - 1.0)); }

Table run_n_scaling(const ExperimentConfig& config) {
  const auto& axis = config.axis("n_atoms");
  Table table;
  table.columns = {"N", "s1", "s2_numeric", "s2_printed", "s2_agrees", "vartheta", "F_eff"};
  for (int n = static_cast<int>(axis.min); n <= static_cast<int>(axis.max); ++n) {
    ExperimentConfig cell = config;
    cell.model = ModelKind::Effective;
    cell.rates = DecoherenceRates{0.0, 0.0, config.rates.rydberg_ratio};
    cell.system.n_atoms = n;
    cell.stirap.vartheta = vartheta_for(n);
    const EffectiveFrame frame = effective_frame(Basis(cell.system, false));
    const double printed = EffectiveFrame::s2_printed(n);
    const bool agrees = std::abs(frame.s2 - printed) <= 1e-10;
    double f = kNaN;
    std::string state = "ok";
    try {
      f = run_model(cell, make_pulses(cell)).fidelity();
    } catch (const std::exception& e) {
      state = e.what();
    }
    table.add({static_cast<double>(n), frame.s1, frame.s2, printed, agrees ? 1.0 : 0.0, cell.stirap.vartheta, f}, state);
    if (!agrees) {
      table.notes.push_back("N = " + std::to_string(n) + ": numeric s2 = " + number(frame.s2) +
                            " (1/sqrt(N+1)) disagrees with printed 1/sqrt(N^2-1) = " + number(printed));
    }
  }
  return table;
}

FitOutcome fit_corrected_pulses(const ExperimentConfig& config) {
  const std::size_t intervals = config.pulse_grid ? config.pulse_grid : config.resolved_steps();
  const auto grid = uniform_grid(config.stirap.duration, intervals);
  const CorrectedPulses corrected = corrected_pulses(stirap_pulses(config.stirap), grid);

  const std::size_t stride = std::max<std::size_t>(1, grid.size() / 2000);
  std::vector<Sample> one, two;
  for (std::size_t i = 0; i < grid.size(); i += stride) {
    one.push_back({grid[i], corrected.pulses.omega1(grid[i])});
    two.push_back({grid[i], corrected.pulses.omega2(grid[i])});
  }

  FitOutcome out;
  out.omega1 = fit_gaussian_sum(one, config.fit_terms);
  out.omega2 = fit_gaussian_sum(two, config.fit_terms);
  GaussianSumParams flipped = out.omega2.params;
  flipped.sign = -flipped.sign;

  const double duration = config.stirap.duration;
  out.fidelity_corrected = run_model(config, corrected.pulses).fidelity();
  out.fidelity_fit = run_model(config, gaussian_sum_pulses(out.omega1.params, out.omega2.params, duration)).fidelity();
  out.fidelity_fit_flipped = run_model(config, gaussian_sum_pulses(out.omega1.params, flipped, duration)).fidelity();
  out.fidelity_reference = run_model(config, reference_fit_pulses(duration, false)).fidelity();
  out.fidelity_reference_flipped = run_model(config, reference_fit_pulses(duration, true)).fidelity();
  return out;
}

Table fit_table(const FitOutcome& o) {
  Table table;
  table.label_column = "key";
  table.columns = {"value"};
  auto put = [&](const std::string& key, double value) { table.add({value}, "ok", key); };
  for (const auto& [name, report] : {std::pair{"omega1", &o.omega1}, std::pair{"omega2", &o.omega2}}) {
    const auto& terms = report->params.terms;
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const std::string prefix = std::string(name) + "_term" + std::to_string(k + 1);
      put(prefix + "_amplitude", terms[k].amplitude);
      put(prefix + "_center", terms[k].center);
      put(prefix + "_width", terms[k].width);
    }
    put(std::string(name) + "_rms_relative", report->relative_rms());
    put(std::string(name) + "_max_residual", report->max_residual);
    put(std::string(name) + "_converged", report->converged ? 1.0 : 0.0);
  }
  put("F_corrected", o.fidelity_corrected);
  put("F_fit", o.fidelity_fit);
  put("F_fit_omega2_flipped", o.fidelity_fit_flipped);
  put("F_paper_fit", o.fidelity_reference);
  put("F_reference_fit_omega2_flipped", o.fidelity_reference_flipped);
  table.notes.push_back(std::string("omega2 sign giving the higher printed-fit fidelity: ") +
                        (o.fidelity_reference >= o.fidelity_reference_flipped ? "as printed (negative)" : "flipped (positive)"));
  return table;
}

}  // namespace wstate
