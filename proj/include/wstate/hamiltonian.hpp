#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wstate/excitation_space.hpp"

namespace wstate {

class PulseSet;

/// Dense complex operator over a basis.
struct Operator {
  Eigen::MatrixXcd matrix;
  bool hermitian = false;

  Eigen::Index dim() const { return matrix.rows(); }
  /// max |H - H^dagger| entry.
  double hermiticity_defect() const;
};

/// 3x3 operators in the effective frame (|psi1>, |phi>, |Psi>).
using FrameMatrix = Eigen::Matrix3cd;
using FrameVector = Eigen::Vector3cd;

/// Maps physical Rabi frequencies onto the effective pair:
///   Omega'_1 = s1 * Omega_1,  Omega'_2 = s2 * Omega   (Omega_k = Omega, k >= 2).
struct EffectiveFrame {
  int n_atoms = 4;
  double s1 = 0.0;  // <phi|H_al|psi1> per unit Omega_1
  double s2 = 0.0;  // <Psi|H_al|phi> per unit Omega

  /// (N-1)/sqrt(N^2-1).
  static double s1_closed_form(int n_atoms);
  /// 1/sqrt(N+1), the value the projection produces.
  static double s2_closed_form(int n_atoms);
  /// 1/sqrt(N^2-1), the coefficient printed for the general-N effective
  /// Hamiltonian. It is the per-atom coupling <R_k|H_al|phi>, not <Psi|H_al|phi>.
  static double s2_printed(int n_atoms);
};

/// H_ac + H_cf: lambda couples E_k<->c_k, v couples f_k<->c_1 and f_k<->c_{k+1}.
Operator build_static(const Basis& basis);

/// H_al for per-atom amplitudes rabi[k-1] = Omega_k (E_k <-> R_k).
Operator build_drive(const Basis& basis, std::span<const double> rabi);

/// Per-atom physical amplitudes for an effective pulse pair:
///   Omega_1 = Omega'_1 / s1, Omega_{k>=2} = Omega'_2 / s2.
std::vector<double> physical_rabi(const PulseSet& pulses, const EffectiveFrame& frame, double t);

/// H_ac + H_cf + H_al(t) for the physical amplitudes mapped from the pulses.
Operator build_total(const Basis& basis, const Operator& static_part, const PulseSet& pulses,
                     const EffectiveFrame& frame, double t);

/// Projector onto span{R_1..R_N, phi}. Requires lambda == v.
Operator zeno_projector(const Basis& basis);

/// Coupling scale factors from the numeric projection of H_al onto the frame.
/// Requires lambda == v.
EffectiveFrame effective_frame(const Basis& basis);

/// Omega' [[0, sin, 0], [sin, 0, cos], [0, cos, 0]], written directly
/// in terms of the pair (Omega'_1, Omega'_2).
FrameMatrix effective_hamiltonian(double omega1, double omega2);
FrameMatrix effective_hamiltonian(const PulseSet& pulses, double t);

struct EffectiveEigensystem {
  Eigen::Vector3d values;   // 0, +Omega', -Omega'
  Eigen::Matrix3d vectors;  // columns phi_0, phi_+, phi_-
};

/// Closed-form eigenpairs of the effective Hamiltonian. Throws
/// std::invalid_argument for omega_prime < 0.
EffectiveEigensystem effective_eigensystem(double theta1, double omega_prime);

/// W target expressed in the frame: (1/sqrt N, 0, sqrt((N-1)/N)).
FrameVector effective_w_target(int n_atoms);

}  // namespace wstate
