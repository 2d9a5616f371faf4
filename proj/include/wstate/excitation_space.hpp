#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace wstate {

using Complex = std::complex<double>;
using StateVector = Eigen::VectorXcd;

/// Star-coupled network: superatom k sits in cavity k, fiber k joins cavity 1
/// to cavity k+1 (k = 1..N-1). Couplings are in units of 1/T.
struct SystemLayout {
  int n_atoms = 4;
  double lambda = 80.0;
  double v = 80.0;

  /// Throws std::domain_error for n_atoms < 2 and std::invalid_argument for
  /// non-positive couplings.
  void validate() const;
  bool couplings_equal(double rel_tol = 1e-12) const;
};

enum class CarrierKind { Rydberg, Intermediate, CavityPhoton, FiberPhoton, Vacuum };

struct BasisState {
  CarrierKind kind = CarrierKind::Vacuum;
  int site = 0;  // 1-based atom/cavity/fiber number, 0 for the vacuum
  std::size_t index = 0;

  /// Canonical label ("psi1".."psi{4N-1}", "vac").
  std::string label() const;
  /// Physical label such as "R1", "E2", "c3", "f1", "vac".
  std::string carrier_label() const;
};

/// Single-excitation basis in canonical order.
///
/// Ordering (index in parentheses, 0-based):
///
///   R1 (0), E1 (1), c1 (2), then for k = 2..N the block
///   f_{k-1}, c_k, E_k, R_k (3 + 4(k-2) .. 6 + 4(k-2)), then vac (last, open
///   systems only).
///
/// For N = 4 this reproduces psi1..psi15:
///   R1 E1 c1 f1 c2 E2 R2 f2 c3 E3 R3 f3 c4 E4 R4.
class Basis {
 public:
  Basis(const SystemLayout& layout, bool include_vacuum);

  const SystemLayout& layout() const { return layout_; }
  std::size_t size() const { return states_.size(); }
  bool has_vacuum() const { return has_vacuum_; }
  const std::vector<BasisState>& states() const { return states_; }
  const BasisState& operator[](std::size_t i) const { return states_[i]; }

  /// Throws std::out_of_range when the carrier does not exist.
  std::size_t index_of(CarrierKind kind, int site = 0) const;
  std::size_t rydberg(int site) const { return index_of(CarrierKind::Rydberg, site); }
  std::size_t intermediate(int site) const { return index_of(CarrierKind::Intermediate, site); }
  std::size_t cavity(int site) const { return index_of(CarrierKind::CavityPhoton, site); }
  std::size_t fiber(int site) const { return index_of(CarrierKind::FiberPhoton, site); }
  std::size_t vacuum() const { return index_of(CarrierKind::Vacuum); }

  std::vector<std::string> labels() const;

 private:
  SystemLayout layout_;
  bool has_vacuum_;
  std::vector<BasisState> states_;
};

std::vector<BasisState> build_basis(const SystemLayout& layout, bool include_vacuum);

/// |psi1> = |R at atom 1>.
StateVector initial_state(const Basis& basis);
/// (1/sqrt N) sum_k |R at atom k>.
StateVector w_target(const Basis& basis);
/// |Psi> = (1/sqrt(N-1)) sum_{k>=2} |R at atom k>.
StateVector bright_combination(const Basis& basis);

/// Dark state |phi> of the static couplings reached from |psi1> by the drive:
/// the normalized projection of |E at atom 1> onto the null space of
/// H_ac + H_cf. The coefficient on |E at atom 1> is positive. Requires
/// lambda == v; throws std::domain_error otherwise and std::runtime_error if
/// the null space has no overlap with |E at atom 1>.
StateVector dark_state_phi(const Basis& basis);

}  // namespace wstate
