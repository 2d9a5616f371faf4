#include "wstate/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "wstate/errors.hpp"

namespace wstate {

namespace {

constexpr Complex kI{0.0, 1.0};

// Nonzero entries of a collapse operator.
struct Entry {
  Eigen::Index row;
  Eigen::Index col;
  Complex value;
};

std::vector<Entry> nonzeros(const Eigen::MatrixXcd& m) {
  std::vector<Entry> out;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      if (m(i, j) != Complex{}) out.push_back({i, j, m(i, j)});
  return out;
}

StateVector padded_target(const StateVector& target, Eigen::Index dim) {
  if (target.size() == dim) return target;
  if (target.size() + 1 == dim) {
    StateVector out = StateVector::Zero(dim);
    out.head(target.size()) = target;
    return out;
  }
  throw std::invalid_argument("fidelity: target dimension " + std::to_string(target.size()) +
                              " does not match state dimension " + std::to_string(dim));
}

bool should_record(std::size_t step, const IntegratorConfig& config) {
  return step == config.steps || step % std::max<std::size_t>(config.record_every, 1) == 0;
}

}  // namespace

void DecoherenceRates::validate() const {
  if (gamma < 0.0 || kappa < 0.0 || rydberg_ratio < 0.0) {
    throw std::invalid_argument("decoherence rates must be non-negative");
  }
}

std::string LindbladChannel::label() const {
  const std::string k = std::to_string(site);
  switch (kind) {
    case ChannelKind::RydbergDecay: return "rydberg_decay_" + k;
    case ChannelKind::IntermediateDecay: return "intermediate_decay_" + k;
    case ChannelKind::CavityLoss: return "cavity_loss_" + k;
    case ChannelKind::FiberLoss: return "fiber_loss_" + k;
  }
  return "channel_" + k;
}

std::vector<LindbladChannel> collapse_channels(const Basis& basis, const DecoherenceRates& rates) {
  if (!basis.has_vacuum()) throw std::invalid_argument("collapse channels need a vacuum-extended basis");
  rates.validate();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  const int n = basis.layout().n_atoms;
  const std::size_t vac = basis.vacuum();

  auto channel = [&](ChannelKind kind, int site, std::size_t to, std::size_t from, double rate) {
    Operator op{Eigen::MatrixXcd::Zero(dim, dim), false};
    op.matrix(to, from) = std::sqrt(rate);
    return LindbladChannel{std::move(op), kind, site};
  };

  std::vector<LindbladChannel> out;
  out.reserve(4 * n - 1);
  for (int k = 1; k <= n; ++k)
    out.push_back(channel(ChannelKind::RydbergDecay, k, basis.intermediate(k), basis.rydberg(k), rates.rydberg()));
  for (int k = 1; k <= n; ++k)
    out.push_back(channel(ChannelKind::IntermediateDecay, k, vac, basis.intermediate(k), rates.intermediate()));
  for (int k = 1; k <= n; ++k)
    out.push_back(channel(ChannelKind::CavityLoss, k, vac, basis.cavity(k), rates.kappa));
  for (int k = 1; k < n; ++k)
    out.push_back(channel(ChannelKind::FiberLoss, k, vac, basis.fiber(k), rates.kappa));
  return out;
}

void check_step_size(const HamiltonianSource& hamiltonian, double duration, const IntegratorConfig& config) {
  if (config.steps == 0) throw NumericalError("integrator needs at least one step");
  if (!(duration > 0.0)) throw NumericalError("evolution duration must be positive");
  const double h = duration / static_cast<double>(config.steps);
  const std::size_t probes = std::max<std::size_t>(config.step_probes, 2);
  double largest = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    const double t = duration * static_cast<double>(p) / (probes - 1);
    const Eigen::MatrixXcd m = hamiltonian(t);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(m, Eigen::EigenvaluesOnly);
    largest = std::max(largest, eig.eigenvalues().cwiseAbs().maxCoeff());
  }
  if (h * largest > config.max_phase_per_step) {
    std::ostringstream os;
    os << "step " << h << " too coarse: step * max|eigenvalue| = " << h * largest << " exceeds "
       << config.max_phase_per_step << "; use at least "
       << static_cast<std::size_t>(std::ceil(duration * largest / config.max_phase_per_step)) << " steps";
    throw NumericalError(os.str());
  }
}

double fidelity(const StateVector& state, const StateVector& target) {
  const StateVector w = padded_target(target, state.size());
  return std::norm(w.dot(state));
}

double fidelity(const DensityMatrix& rho, const StateVector& target) {
  if (rho.rows() != rho.cols()) throw std::invalid_argument("density matrix must be square");
  const StateVector w = padded_target(target, rho.rows());
  return (w.adjoint() * rho * w)(0).real();
}

Trajectory evolve_schrodinger(const HamiltonianSource& hamiltonian, const StateVector& psi0,
                              const StateVector& target, double duration, const IntegratorConfig& config) {
  if (std::abs(psi0.norm() - 1.0) > 1e-9) throw std::invalid_argument("initial state must be normalized");
  check_step_size(hamiltonian, duration, config);

  const double h = duration / static_cast<double>(config.steps);
  const StateVector w = padded_target(target, psi0.size());
  Trajectory traj;
  auto record = [&](double t, const StateVector& psi) {
    traj.times.push_back(t);
    traj.fidelity.push_back(std::norm(w.dot(psi)));
    std::vector<double> pops(psi.size());
    for (Eigen::Index i = 0; i < psi.size(); ++i) pops[i] = std::norm(psi(i));
    traj.populations.push_back(std::move(pops));
    traj.norm_drift = std::max(traj.norm_drift, std::abs(psi.norm() - 1.0));
  };

  StateVector psi = psi0;
  record(0.0, psi);
  for (std::size_t step = 1; step <= config.steps; ++step) {
    const double t = h * static_cast<double>(step - 1);
    const Eigen::MatrixXcd h0 = hamiltonian(t);
    const Eigen::MatrixXcd hm = hamiltonian(t + 0.5 * h);
    const Eigen::MatrixXcd h1 = hamiltonian(t + h);
    const StateVector k1 = -kI * (h0 * psi);
    const StateVector k2 = -kI * (hm * (psi + 0.5 * h * k1));
    const StateVector k3 = -kI * (hm * (psi + 0.5 * h * k2));
    const StateVector k4 = -kI * (h1 * (psi + h * k3));
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (should_record(step, config)) record(h * static_cast<double>(step), psi);
  }
  traj.times.back() = duration;
  traj.final_state = psi;
  return traj;
}

Trajectory evolve_lindblad(const HamiltonianSource& hamiltonian, const std::vector<LindbladChannel>& channels,
                           const DensityMatrix& rho0, const StateVector& target, double duration,
                           const IntegratorConfig& config) {
  const Eigen::Index dim = rho0.rows();
  if (rho0.cols() != dim) throw std::invalid_argument("density matrix must be square");
  if ((rho0 - rho0.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw std::invalid_argument("rho0 must be hermitian");
  if (std::abs(rho0.trace().real() - 1.0) > 1e-10) throw std::invalid_argument("rho0 must have unit trace");
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho0, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("rho0 must be positive semidefinite");
  }
  check_step_size(hamiltonian, duration, config);

  // Collapse operators are sparse: keep their entries and the dense sum L^+L.
  std::vector<std::vector<Entry>> jumps;
  Eigen::MatrixXcd decay = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& ch : channels) {
    if (ch.op.dim() != dim) throw std::invalid_argument("collapse operator dimension mismatch");
    auto entries = nonzeros(ch.op.matrix);
    if (entries.empty()) continue;
    decay += ch.op.matrix.adjoint() * ch.op.matrix;
    jumps.push_back(std::move(entries));
  }
  const Eigen::MatrixXcd half_decay = 0.5 * decay;
  const bool diagonal_decay = (half_decay - Eigen::MatrixXcd(half_decay.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  const Eigen::VectorXd half_rates = half_decay.diagonal().real();

  struct JumpTerm {
    Eigen::Index out_row, out_col, in_row, in_col;
    Complex weight;
  };
  std::vector<JumpTerm> jump_terms;
  for (const auto& entries : jumps)
    for (const auto& a : entries)
      for (const auto& b : entries) jump_terms.push_back({a.row, b.row, a.col, b.col, a.value * std::conj(b.value)});

  // With rho and H hermitian, i[rho, H] - {D/2, rho} = A + A^+ for A = i rho H - rho D/2.
  DensityMatrix half_term(dim, dim);
  auto rhs = [&](const std::vector<Entry>& h_entries, const DensityMatrix& rho, DensityMatrix& d) {
    half_term.setZero();
    for (const auto& e : h_entries) half_term.col(e.col) += (kI * e.value) * rho.col(e.row);
    if (diagonal_decay) {
      for (Eigen::Index j = 0; j < dim; ++j) half_term.col(j) -= half_rates(j) * rho.col(j);
    } else {
      half_term.noalias() -= rho * half_decay;
    }
    d = half_term + half_term.adjoint();
    for (const auto& j : jump_terms) d(j.out_row, j.out_col) += j.weight * rho(j.in_row, j.in_col);
  };

  const double h = duration / static_cast<double>(config.steps);
  const StateVector w = padded_target(target, dim);
  Trajectory traj;
  auto record = [&](double t, const DensityMatrix& rho) {
    traj.times.push_back(t);
    traj.fidelity.push_back((w.adjoint() * rho * w)(0).real());
    std::vector<double> pops(dim);
    for (Eigen::Index i = 0; i < dim; ++i) pops[i] = rho(i, i).real();
    traj.populations.push_back(std::move(pops));
    traj.trace_drift = std::max(traj.trace_drift, std::abs(rho.trace().real() - 1.0));
    if (config.check_positivity) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho, Eigen::EigenvaluesOnly);
      const double lowest = eig.eigenvalues().minCoeff();
      traj.min_eigenvalue = std::min(traj.min_eigenvalue, lowest);
      if (lowest < config.positivity_floor) {
        std::ostringstream os;
        os << "density matrix lost positivity at t = " << t << " (min eigenvalue " << lowest
           << "); step too large";
        throw NumericalError(os.str());
      }
    }
  };

  DensityMatrix rho = rho0;
  record(0.0, rho);
  std::vector<Entry> h0 = nonzeros(hamiltonian(0.0));
  DensityMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);
  for (std::size_t step = 1; step <= config.steps; ++step) {
    const double t = h * static_cast<double>(step - 1);
    const std::vector<Entry> hm = nonzeros(hamiltonian(t + 0.5 * h));
    std::vector<Entry> h1 = nonzeros(hamiltonian(t + h));
    rhs(h0, rho, k1);
    stage = rho + 0.5 * h * k1;
    rhs(hm, stage, k2);
    stage = rho + 0.5 * h * k2;
    rhs(hm, stage, k3);
    stage = rho + h * k3;
    rhs(h1, stage, k4);
    rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    traj.hermiticity_drift = std::max(traj.hermiticity_drift, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    rho = 0.5 * (rho + rho.adjoint()).eval();
    if (should_record(step, config)) record(h * static_cast<double>(step), rho);
    h0 = std::move(h1);
  }
  traj.times.back() = duration;
  traj.final_density = rho;
  return traj;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory, const std::vector<std::string>& labels) {
  out << "t,F";
  for (const auto& l : labels) out << ',' << l;
  out << '\n' << std::setprecision(12);
  for (std::size_t i = 0; i < trajectory.times.size(); ++i) {
    out << trajectory.times[i] << ',' << trajectory.fidelity[i];
    const auto& pops = trajectory.populations[i];
    for (std::size_t j = 0; j < labels.size() && j < pops.size(); ++j) out << ',' << pops[j];
    out << '\n';
  }
}

}  // namespace wstate
