#include "wstate/excitation_space.hpp"

#include <cmath>
#include <stdexcept>

#include "wstate/hamiltonian.hpp"

namespace wstate {

void SystemLayout::validate() const {
  if (n_atoms < 2) {
    throw std::domain_error("n_atoms must be at least 2, got " + std::to_string(n_atoms));
  }
  if (!(lambda > 0.0) || !(v > 0.0)) {
    throw std::invalid_argument("couplings lambda and v must be positive");
  }
}

bool SystemLayout::couplings_equal(double rel_tol) const {
  return std::abs(lambda - v) <= rel_tol * std::max(std::abs(lambda), std::abs(v));
}

std::string BasisState::label() const {
  if (kind == CarrierKind::Vacuum) return "vac";
  return "psi" + std::to_string(index + 1);
}

std::string BasisState::carrier_label() const {
  switch (kind) {
    case CarrierKind::Rydberg: return "R" + std::to_string(site);
    case CarrierKind::Intermediate: return "E" + std::to_string(site);
    case CarrierKind::CavityPhoton: return "c" + std::to_string(site);
    case CarrierKind::FiberPhoton: return "f" + std::to_string(site);
    case CarrierKind::Vacuum: return "vac";
  }
  return "?";
}

std::vector<BasisState> build_basis(const SystemLayout& layout, bool include_vacuum) {
  layout.validate();
  std::vector<BasisState> out;
  out.reserve(4 * layout.n_atoms);
  auto push = [&](CarrierKind kind, int site) { out.push_back({kind, site, out.size()}); };

  push(CarrierKind::Rydberg, 1);
  push(CarrierKind::Intermediate, 1);
  push(CarrierKind::CavityPhoton, 1);
  for (int k = 2; k <= layout.n_atoms; ++k) {
    push(CarrierKind::FiberPhoton, k - 1);
    push(CarrierKind::CavityPhoton, k);
    push(CarrierKind::Intermediate, k);
    push(CarrierKind::Rydberg, k);
  }
  if (include_vacuum) push(CarrierKind::Vacuum, 0);
  return out;
}

Basis::Basis(const SystemLayout& layout, bool include_vacuum)
    : layout_(layout), has_vacuum_(include_vacuum), states_(build_basis(layout, include_vacuum)) {}

std::size_t Basis::index_of(CarrierKind kind, int site) const {
  // Closed form of the canonical ordering.
  const int n = layout_.n_atoms;
  if (kind == CarrierKind::Vacuum) {
    if (!has_vacuum_) throw std::out_of_range("basis has no vacuum state");
    return states_.size() - 1;
  }
  const int max_site = kind == CarrierKind::FiberPhoton ? n - 1 : n;
  if (site < 1 || site > max_site) {
    throw std::out_of_range("carrier site " + std::to_string(site) + " out of range");
  }
  if (kind == CarrierKind::FiberPhoton) return 3 + 4 * (site - 1);
  if (site == 1) {
    switch (kind) {
      case CarrierKind::Rydberg: return 0;
      case CarrierKind::Intermediate: return 1;
      default: return 2;
    }
  }
  const std::size_t block = 3 + 4 * (site - 2);
  switch (kind) {
    case CarrierKind::CavityPhoton: return block + 1;
    case CarrierKind::Intermediate: return block + 2;
    default: return block + 3;
  }
}

std::vector<std::string> Basis::labels() const {
  std::vector<std::string> out;
  out.reserve(states_.size());
  for (const auto& s : states_) out.push_back(s.label());
  return out;
}

StateVector initial_state(const Basis& basis) {
  StateVector psi = StateVector::Zero(basis.size());
  psi(basis.rydberg(1)) = 1.0;
  return psi;
}

StateVector w_target(const Basis& basis) {
  const int n = basis.layout().n_atoms;
  StateVector psi = StateVector::Zero(basis.size());
  const double amp = 1.0 / std::sqrt(static_cast<double>(n));
  for (int k = 1; k <= n; ++k) psi(basis.rydberg(k)) = amp;
  return psi;
}

StateVector bright_combination(const Basis& basis) {
  const int n = basis.layout().n_atoms;
  StateVector psi = StateVector::Zero(basis.size());
  const double amp = 1.0 / std::sqrt(static_cast<double>(n - 1));
  for (int k = 2; k <= n; ++k) psi(basis.rydberg(k)) = amp;
  return psi;
}

StateVector dark_state_phi(const Basis& basis) {
  if (!basis.layout().couplings_equal()) {
    throw std::domain_error("dark state |phi> is defined for lambda == v");
  }
  // Null space of the static couplings on the E/c/f block (Rydberg and vacuum
  // states are decoupled from it).
  std::vector<std::size_t> block;
  for (const auto& s : basis.states()) {
    if (s.kind != CarrierKind::Rydberg && s.kind != CarrierKind::Vacuum) block.push_back(s.index);
  }
  const Operator h = build_static(basis);
  const auto m = static_cast<Eigen::Index>(block.size());
  Eigen::MatrixXd sub(m, m);
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < m; ++j) sub(i, j) = h.matrix(block[i], block[j]).real();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sub);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  const double tol = 1e-9 * std::max(scale, 1.0);

  Eigen::Index e1 = -1;
  for (Eigen::Index i = 0; i < m; ++i)
    if (block[i] == basis.intermediate(1)) e1 = i;

  Eigen::VectorXd projected = Eigen::VectorXd::Zero(m);
  for (Eigen::Index c = 0; c < m; ++c) {
    if (std::abs(eig.eigenvalues()(c)) > tol) continue;
    const auto u = eig.eigenvectors().col(c);
    projected += u(e1) * u;
  }
  const double norm = projected.norm();
  if (norm < 1e-8) {
    throw std::runtime_error("null space of the static couplings has no overlap with |E at atom 1>");
  }
  projected /= norm;
  if (projected(e1) < 0) projected = -projected;

  StateVector phi = StateVector::Zero(basis.size());
  for (Eigen::Index i = 0; i < m; ++i) phi(block[i]) = projected(i);
  return phi;
}

}  // namespace wstate
