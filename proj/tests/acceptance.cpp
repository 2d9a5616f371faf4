// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance            run every criterion
//   acceptance 3 5        run the listed criteria
//
// Exit status is the number of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <thread>

#include "wstate/config.hpp"
#include "wstate/evolution.hpp"
#include "wstate/experiments.hpp"
#include "wstate/hamiltonian.hpp"
#include "wstate/superadiabatic.hpp"

using namespace wstate;

namespace {

constexpr Complex kI{0.0, 1.0};

struct Verdict {
  bool pass;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double x, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << x;
  return os.str();
}

Verdict peak_fidelity() {
  const ExperimentConfig cfg = default_config();
  Stopwatch clock;
  const double f = run_model(cfg, make_pulses(cfg)).fidelity();
  const double elapsed = clock.seconds();
  const bool pass = std::abs(f - 0.9994) <= 0.0005 && elapsed < 1.0;
  return {pass, "full model F(T) = " + num(f) + " (target 0.9994 +/- 0.0005), runtime " + num(elapsed, 3) + " s"};
}

Verdict open_floor() {
  ExperimentConfig cfg = default_config();
  const double lambda = cfg.system.lambda;
  cfg.rates = {0.005 * lambda, 0.005 * lambda, 0.01};
  Stopwatch clock;
  const double f = run_model(cfg, make_pulses(cfg)).fidelity();
  const double single = clock.seconds();

  // Heatmap budget: 41 x 41 cells on 8 workers in under 10 minutes.
  const auto kappas = cfg.axis("kappa_over_lambda").values();
  const auto gammas = cfg.axis("gamma_over_lambda").values();
  const std::size_t cells = kappas.size() * gammas.size();
  const unsigned cores = std::max(1u, std::thread::hardware_concurrency());
  double map_seconds = 0.0;
  std::string how;
  if (!std::getenv("WSTATE_ACCEPT_QUICK")) {
    Stopwatch map_clock;
    run_decoherence_map(cfg, 8);
    map_seconds = map_clock.seconds();
    how = "measured with 8 workers on " + std::to_string(cores) + " hardware threads";
  } else {
    ExperimentConfig sample = cfg;
    sample.axes["kappa_over_lambda"] = {"kappa_over_lambda", 0.0, 0.005, 2};
    sample.axes["gamma_over_lambda"] = {"gamma_over_lambda", 0.0, 0.005, 2};
    Stopwatch map_clock;
    run_decoherence_map(sample, 1);
    const double per_cell = map_clock.seconds() / 4.0;
    const unsigned parallel = std::min(8u, cores);
    map_seconds = per_cell * static_cast<double>(cells) / parallel;
    how = "projected from " + num(per_cell, 3) + " s/cell over " + std::to_string(parallel) +
          " usable workers (" + std::to_string(cores) + " hardware threads)";
  }
  const bool pass = f >= 0.975 && single < 10.0 && map_seconds < 600.0;
  return {pass, "F(T) = " + num(f) + " at kappa/lambda = gamma/lambda = 0.005 (floor 0.975), single run " +
                    num(single, 3) + " s; 41x41 map " + num(map_seconds, 4) + " s " + how};
}

Verdict boundary_angles() {
  const auto grid = uniform_grid(1.0, 2000);
  StirapParams p;
  p.omega0 = 1.0;
  const AngleSchedule reference = compute_angles(stirap_pulses(p), grid);
  double start = 0.0, end = 0.0, spread = 0.0;
  for (double omega0 = 1.0; omega0 <= 20.0 + 1e-12; omega0 += 0.5) {
    p.omega0 = omega0;
    const AngleSchedule s = compute_angles(stirap_pulses(p), grid);
    start = std::max(start, std::abs(s.theta1.front()));
    end = std::max(end, std::abs(s.theta1.back() + std::numbers::pi / 3));
    for (std::size_t i = 0; i < grid.size(); ++i) spread = std::max(spread, std::abs(s.theta1[i] - reference.theta1[i]));
  }
  const bool pass = start <= 1e-3 && end <= 1e-3 && spread <= 1e-12;
  return {pass, "max |theta1(0)| = " + num(start, 3) + ", max |theta1(T) + pi/3| = " + num(end, 3) +
                    ", max theta1 change under Omega0 rescaling = " + num(spread, 3)};
}

Verdict time_ordering() {
  const Table t = run_time_comparison(default_config());
  const auto& end = t.rows.back();
  const double super = end[1], adiabatic = end[2], slow = end[3];
  const bool pass = super > adiabatic && slow > adiabatic && super >= 0.99 && adiabatic <= 0.95;
  return {pass, "F_super(8/Omega0) = " + num(super) + ", F_adiab(8/Omega0) = " + num(adiabatic) +
                    ", F_adiab(35/Omega0) = " + num(slow)};
}

Verdict oracles() {
  const PulseSet pulses = stirap_pulses({});
  const double h = 1e-5;
  auto theta2 = [&](double t) {
    const MixingAngle m = mixing_angle(pulses, t);
    return std::atan2(std::abs(m.theta1_dot), m.omega_prime);
  };
  auto a1 = [&](double t) { return transform_a1(mixing_angle(pulses, t).theta1); };
  auto a2 = [&](double t) { return transform_a2(theta2(t)); };

  double e1 = 0.0, e2 = 0.0, ecd = 0.0;
  for (double t = 0.1; t <= 0.9 + 1e-12; t += 0.05) {
    const MixingAngle m = mixing_angle(pulses, t);
    const FrameMatrix da1 = (a1(t + h) - a1(t - h)) / (2 * h);
    const FrameMatrix da2 = (a2(t + h) - a2(t - h)) / (2 * h);
    const double theta2_dot = (theta2(t + h) - theta2(t - h)) / (2 * h);
    const FrameMatrix h1 = a1(t).adjoint() * effective_hamiltonian(pulses, t) * a1(t) - kI * a1(t).adjoint() * da1;
    e1 = std::max(e1, (h1 - first_picture_hamiltonian(m.omega_prime, m.theta1_dot)).cwiseAbs().maxCoeff());
    const FrameMatrix closed_h1 = first_picture_hamiltonian(m.omega_prime, m.theta1_dot);
    const FrameMatrix h2 = a2(t).adjoint() * closed_h1 * a2(t) - kI * a2(t).adjoint() * da2;
    e2 = std::max(e2, (h2 - second_picture_hamiltonian(std::hypot(m.omega_prime, m.theta1_dot), theta2_dot))
                          .cwiseAbs()
                          .maxCoeff());
    const FrameMatrix cd = kI * a1(t) * da2 * a2(t).adjoint() * a1(t).adjoint();
    ecd = std::max(ecd, (cd - cd_second_order(m.theta1, theta2_dot)).cwiseAbs().maxCoeff());
  }

  double projection = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const Basis basis({n, 80.0, 80.0}, false);
    const EffectiveFrame frame = effective_frame(basis);
    const Eigen::MatrixXcd p0 = zeno_projector(basis).matrix;
    Eigen::MatrixXcd b(basis.size(), 3);
    b.col(0) = initial_state(basis);
    b.col(1) = dark_state_phi(basis);
    b.col(2) = bright_combination(basis);
    std::vector<double> rabi(n, -2.7);
    rabi[0] = 5.3;
    const Eigen::MatrixXcd projected = p0 * build_drive(basis, rabi).matrix * p0;
    const Eigen::MatrixXcd embedded = b * effective_hamiltonian(frame.s1 * 5.3, frame.s2 * -2.7) * b.adjoint();
    projection = std::max(projection, (projected - embedded).cwiseAbs().maxCoeff());
  }

  const HamiltonianSource tracked = [&](double t) {
    return Eigen::MatrixXcd(effective_hamiltonian(pulses, t) + cd_first_order(mixing_angle(pulses, t).theta1_dot));
  };
  StateVector psi0 = StateVector::Zero(3);
  psi0(0) = 1.0;
  const double tracking = evolve_schrodinger(tracked, psi0, effective_w_target(4), 1.0, {}).final_fidelity();

  const bool pass = e1 <= 1e-6 && e2 <= 1e-6 && ecd <= 1e-6 && projection <= 1e-10 && tracking >= 1.0 - 1e-6;
  return {pass, "H1 " + num(e1, 3) + ", H2 " + num(e2, 3) + ", H_CD2 " + num(ecd, 3) + " (bound 1e-6); P0 H_al P0 " +
                    num(projection, 3) + " (bound 1e-10); H_eff + H_CD1 tracking F = " + num(tracking, 10)};
}

Verdict fit_loop() {
  const FitOutcome o = fit_corrected_pulses(default_config());
  const double r1 = o.omega1.relative_rms(), r2 = o.omega2.relative_rms();
  const bool printed_sign = o.fidelity_reference >= o.fidelity_reference_flipped;
  const double best = std::max(o.fidelity_reference, o.fidelity_reference_flipped);
  const bool pass = r1 <= 0.02 && r2 <= 0.02 && best >= 0.99;
  return {pass, "RMS/peak omega1 " + num(100 * r1, 3) + "%, omega2 " + num(100 * r2, 3) +
                    "% (bound 2%); printed fit F(T) = " + num(o.fidelity_reference) + " with omega2 sign as printed, " +
                    num(o.fidelity_reference_flipped) + " flipped; sign kept: " + (printed_sign ? "printed" : "flipped") +
                    "; own fit F(T) = " + num(o.fidelity_fit)};
}

Verdict conservation() {
  const ExperimentConfig closed = default_config();
  const Trajectory tc = run_model(closed, make_pulses(closed)).trajectory;

  ExperimentConfig open = default_config({"decoherence.gamma=0.4", "decoherence.kappa=0.4"});
  IntegratorConfig every = open.integrator();
  every.record_every = 1;
  const Trajectory to = run_model(open, make_pulses(open), open.system, open.rates, every).trajectory;

  const ExperimentConfig fine = default_config({"evolution.steps=20000", "pulses.grid=10000"});
  const double halving = std::abs(run_model(fine, make_pulses(fine)).fidelity() - tc.final_fidelity());

  const bool pass = tc.norm_drift <= 1e-7 && to.trace_drift <= 1e-8 && to.min_eigenvalue >= -1e-6 && halving <= 1e-6;
  return {pass, "norm drift " + num(tc.norm_drift, 3) + ", trace drift " + num(to.trace_drift, 3) +
                    ", min eigenvalue " + num(to.min_eigenvalue, 3) + " over " + std::to_string(to.times.size()) +
                    " samples, step-halving dF " + num(halving, 3)};
}

Verdict n_scaling() {
  const Table t = run_n_scaling(default_config());
  bool pass = t.rows.size() == 5;
  double low = 1.0, s2_error = 0.0;
  std::size_t flagged = 0, expected_flags = 0;
  for (const auto& row : t.rows) {
    const double n = row[0];
    low = std::min(low, row[6]);
    s2_error = std::max(s2_error, std::abs(row[2] - 1.0 / std::sqrt(n + 1.0)));
    const bool differs = std::abs(row[2] - row[3]) > 1e-10;
    expected_flags += differs;
    flagged += differs && row[4] == 0.0;
  }
  pass = pass && low >= 0.99 && s2_error <= 1e-10 && flagged == expected_flags && t.notes.size() == expected_flags;
  return {pass, "min F_eff = " + num(low) + " over N = 2..6, |s2 - 1/sqrt(N+1)| <= " + num(s2_error, 3) + ", " +
                    std::to_string(flagged) + " of " + std::to_string(expected_flags) +
                    " disagreements with the printed 1/sqrt(N^2-1) flagged"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<std::string, std::function<Verdict()>>> criteria{
      {1, {"peak closed-system fidelity", peak_fidelity}},
      {2, {"open-system floor", open_floor}},
      {3, {"boundary angles", boundary_angles}},
      {4, {"superadiabatic vs adiabatic ordering", time_ordering}},
      {5, {"oracle equivalences", oracles}},
      {6, {"Gaussian fit loop", fit_loop}},
      {7, {"conservation suite", conservation}},
      {8, {"N-scaling", n_scaling}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, c] : criteria) selected.push_back(id);
  }

  int failed = 0;
  for (int id : selected) {
    auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::cout << "FAIL criterion " << id << ": unknown criterion\n";
      ++failed;
      continue;
    }
    Verdict v{false, ""};
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << it->second.first << "): " << v.detail
              << std::endl;
    failed += !v.pass;
  }
  return failed;
}
