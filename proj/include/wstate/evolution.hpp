#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wstate/excitation_space.hpp"
#include "wstate/hamiltonian.hpp"

namespace wstate {

using DensityMatrix = Eigen::MatrixXcd;

/// H(t) sampled at the RK4 stage times t, t + h/2, t + h.
using HamiltonianSource = std::function<Eigen::MatrixXcd(double t)>;

struct IntegratorConfig {
  std::size_t steps = 10000;
  /// Record every n-th step (and always the final one).
  std::size_t record_every = 10;
  /// Enforced bound on step * max|eigenvalue(H)|.
  double max_phase_per_step = 0.05;
  /// Number of probe times used for the step check.
  std::size_t step_probes = 64;
  /// Lindblad only: abort when min eigenvalue of rho drops below this.
  double positivity_floor = -1e-6;
  /// Lindblad only: check positivity at recorded samples.
  bool check_positivity = true;
};

/// Rates in 1/T. gamma_R = rydberg_ratio * gamma, gamma_E = gamma,
/// kappa_c = kappa_f = kappa.
struct DecoherenceRates {
  double gamma = 0.0;
  double kappa = 0.0;
  double rydberg_ratio = 0.01;

  double rydberg() const { return rydberg_ratio * gamma; }
  double intermediate() const { return gamma; }
  bool zero() const { return gamma == 0.0 && kappa == 0.0; }
  void validate() const;
};

enum class ChannelKind { RydbergDecay, IntermediateDecay, CavityLoss, FiberLoss };

struct LindbladChannel {
  Operator op;  // sqrt(rate) folded in
  ChannelKind kind;
  int site;
  std::string label() const;
};

/// N Rydberg + N intermediate + N cavity + (N-1) fiber channels. Requires a
/// vacuum-extended basis (std::invalid_argument otherwise).
std::vector<LindbladChannel> collapse_channels(const Basis& basis, const DecoherenceRates& rates);

struct Trajectory {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<std::vector<double>> populations;  // [sample][basis index]
  StateVector final_state;                        // closed runs
  DensityMatrix final_density;                    // open runs

  double norm_drift = 0.0;          // max | ||psi|| - 1 |
  double trace_drift = 0.0;         // max | tr rho - 1 |
  double min_eigenvalue = 1.0;      // min over checked samples
  double hermiticity_drift = 0.0;   // max |rho - rho^dagger| before symmetrization

  double final_fidelity() const { return fidelity.empty() ? 0.0 : fidelity.back(); }
};

/// Max |eigenvalue| of H at `probes` evenly spaced times; throws
/// NumericalError if step * that exceeds the configured bound.
void check_step_size(const HamiltonianSource& hamiltonian, double duration, const IntegratorConfig& config);

/// Fixed-step RK4 for i d/dt psi = H psi.
Trajectory evolve_schrodinger(const HamiltonianSource& hamiltonian, const StateVector& psi0,
                              const StateVector& target, double duration, const IntegratorConfig& config);

/// Fixed-step RK4 for d/dt rho = i[rho, H] + sum_k (L rho L^+ - {L^+L, rho}/2),
/// re-symmetrized every step.
Trajectory evolve_lindblad(const HamiltonianSource& hamiltonian, const std::vector<LindbladChannel>& channels,
                           const DensityMatrix& rho0, const StateVector& target, double duration,
                           const IntegratorConfig& config);

/// |<target|psi>|^2. A target one shorter than the state is zero-padded
/// (vacuum-extended basis); any other mismatch throws std::invalid_argument.
double fidelity(const StateVector& state, const StateVector& target);
/// <target|rho|target>, same padding rule.
double fidelity(const DensityMatrix& rho, const StateVector& target);

/// Columns t, F, one population column per basis label.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<std::string>& labels);

}  // namespace wstate
