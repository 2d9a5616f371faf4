#include "wstate/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "wstate/pulses.hpp"

namespace wstate {

namespace {

void couple(Eigen::MatrixXcd& m, std::size_t a, std::size_t b, double g) {
  m(a, b) += g;
  m(b, a) += g;
}

void require_equal_couplings(const Basis& basis, const char* what) {
  if (!basis.layout().couplings_equal()) {
    throw std::domain_error(std::string(what) + " requires lambda == v");
  }
}

}  // namespace

double Operator::hermiticity_defect() const {
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

double EffectiveFrame::s1_closed_form(int n) {
  return (n - 1) / std::sqrt(static_cast<double>(n) * n - 1.0);
}

double EffectiveFrame::s2_closed_form(int n) { return 1.0 / std::sqrt(n + 1.0); }

double EffectiveFrame::s2_printed(int n) { return 1.0 / std::sqrt(static_cast<double>(n) * n - 1.0); }

Operator build_static(const Basis& basis) {
  const auto& layout = basis.layout();
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Operator h{Eigen::MatrixXcd::Zero(dim, dim), true};
  for (int k = 1; k <= layout.n_atoms; ++k) {
    couple(h.matrix, basis.intermediate(k), basis.cavity(k), layout.lambda);
  }
  for (int k = 1; k < layout.n_atoms; ++k) {
    couple(h.matrix, basis.fiber(k), basis.cavity(1), layout.v);
    couple(h.matrix, basis.fiber(k), basis.cavity(k + 1), layout.v);
  }
  return h;
}

Operator build_drive(const Basis& basis, std::span<const double> rabi) {
  const int n = basis.layout().n_atoms;
  if (rabi.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("build_drive expects one amplitude per atom");
  }
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Operator h{Eigen::MatrixXcd::Zero(dim, dim), true};
  for (int k = 1; k <= n; ++k) {
    if (rabi[k - 1] != 0.0) couple(h.matrix, basis.intermediate(k), basis.rydberg(k), rabi[k - 1]);
  }
  return h;
}

std::vector<double> physical_rabi(const PulseSet& pulses, const EffectiveFrame& frame, double t) {
  std::vector<double> rabi(frame.n_atoms, pulses.omega2(t) / frame.s2);
  rabi[0] = pulses.omega1(t) / frame.s1;
  return rabi;
}

Operator build_total(const Basis& basis, const Operator& static_part, const PulseSet& pulses,
                     const EffectiveFrame& frame, double t) {
  const auto rabi = physical_rabi(pulses, frame, t);
  Operator h = build_drive(basis, rabi);
  h.matrix += static_part.matrix;
  return h;
}

Operator zeno_projector(const Basis& basis) {
  require_equal_couplings(basis, "zeno_projector");
  const auto dim = static_cast<Eigen::Index>(basis.size());
  Operator p{Eigen::MatrixXcd::Zero(dim, dim), true};
  for (int k = 1; k <= basis.layout().n_atoms; ++k) {
    const auto r = basis.rydberg(k);
    p.matrix(r, r) = 1.0;
  }
  const StateVector phi = dark_state_phi(basis);
  p.matrix += phi * phi.adjoint();
  return p;
}

EffectiveFrame effective_frame(const Basis& basis) {
  require_equal_couplings(basis, "effective_frame");
  const int n = basis.layout().n_atoms;
  const StateVector phi = dark_state_phi(basis);
  const StateVector psi1 = initial_state(basis);
  const StateVector bright = bright_combination(basis);

  std::vector<double> first(n, 0.0);
  first[0] = 1.0;
  std::vector<double> rest(n, 1.0);
  rest[0] = 0.0;

  EffectiveFrame frame;
  frame.n_atoms = n;
  frame.s1 = (phi.adjoint() * build_drive(basis, first).matrix * psi1)(0).real();
  frame.s2 = (bright.adjoint() * build_drive(basis, rest).matrix * phi)(0).real();
  return frame;
}

FrameMatrix effective_hamiltonian(double omega1, double omega2) {
  FrameMatrix h = FrameMatrix::Zero();
  h(0, 1) = h(1, 0) = omega1;
  h(1, 2) = h(2, 1) = omega2;
  return h;
}

FrameMatrix effective_hamiltonian(const PulseSet& pulses, double t) {
  return effective_hamiltonian(pulses.omega1(t), pulses.omega2(t));
}

EffectiveEigensystem effective_eigensystem(double theta1, double omega_prime) {
  if (omega_prime < 0.0) throw std::invalid_argument("omega_prime must be non-negative");
  const double s = std::sin(theta1);
  const double c = std::cos(theta1);
  const double r = 1.0 / std::sqrt(2.0);
  EffectiveEigensystem out;
  out.values << 0.0, omega_prime, -omega_prime;
  out.vectors << c, r * s, r * s,
                 0.0, r, -r,
                 -s, r * c, r * c;
  return out;
}

FrameVector effective_w_target(int n_atoms) {
  const double n = n_atoms;
  return FrameVector(1.0 / std::sqrt(n), 0.0, std::sqrt((n - 1.0) / n));
}

}  // namespace wstate
