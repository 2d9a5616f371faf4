#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "wstate/hamiltonian.hpp"
#include "wstate/pulses.hpp"

namespace wstate {

/// Mixing angles sampled on a common grid.
///
///   theta1 = atan2(Omega'_1, Omega'_2)        (unwrapped along the grid)
///   theta1_dot = (dO1 O2 - O1 dO2) / Omega'^2 (analytic)
///   theta2 = atan(|theta1_dot| / Omega')
///   theta2_dot                                 (central differences, one-sided at ends)
///   omega_dprime = sqrt(Omega'^2 + theta1_dot^2)
///
/// The second-picture closed forms assume theta1_dot <= 0, which holds for the
/// counterintuitive sequence with vartheta < 0; samples violating it are
/// counted in `rising_samples`.
struct AngleSchedule {
  std::vector<double> grid;
  std::vector<double> theta1;
  std::vector<double> theta1_dot;
  std::vector<double> theta2;
  std::vector<double> theta2_dot;
  std::vector<double> omega_prime;
  std::vector<double> omega_dprime;
  std::vector<bool> degenerate;  // Omega' and |theta1_dot| below threshold
  std::size_t degenerate_count = 0;
  std::size_t rising_samples = 0;

  std::size_t size() const { return grid.size(); }
};

std::vector<double> uniform_grid(double duration, std::size_t intervals);

/// `epsilon_scale` times max Omega' on the grid is the 0/0 threshold.
AngleSchedule compute_angles(const PulseSet& pulses, std::span<const double> grid,
                             double epsilon_scale = 1e-12);

struct MixingAngle {
  double theta1;
  double theta1_dot;
  double omega_prime;
};

/// Pointwise theta1, theta1_dot, Omega' (analytic, no unwrapping).
MixingAngle mixing_angle(const PulseSet& pulses, double t);

/// Columns are phi_0, phi_+, phi_-.
FrameMatrix transform_a1(double theta1);

/// diag(0, Omega', -Omega') - i theta1_dot/sqrt2 [[0,1,1],[-1,0,0],[-1,0,0]].
FrameMatrix first_picture_hamiltonian(double omega_prime, double theta1_dot);

/// i theta1_dot |psi1><Psi| + h.c. Analysis only; needs a direct psi1<->Psi coupling.
FrameMatrix cd_first_order(double theta1_dot);

/// Unitary whose columns are the eigenvectors xi_0, xi_+, -xi_- of the first-
/// picture Hamiltonian (theta1_dot <= 0):
///
///   [[-i cos, i sin/sqrt2, -i sin/sqrt2],
///    [ sin/sqrt2, (1+cos)/2, (1-cos)/2],
///    [-sin/sqrt2, (1-cos)/2, (1+cos)/2]]      (angle theta2)
///
/// It equals the printed matrix evaluated at theta2 + pi/2, so both share the
/// same time derivative structure and give the same second-order correction.
FrameMatrix transform_a2(double theta2);

/// The matrix exactly as printed. Its first column is not a null vector of the
/// first-picture Hamiltonian; kept to expose that discrepancy.
FrameMatrix transform_a2_as_printed(double theta2);

/// diag(0, Omega'', -Omega'') - i theta2_dot/sqrt2 [[0,-1,1],[1,0,0],[-1,0,0]].
FrameMatrix second_picture_hamiltonian(double omega_dprime, double theta2_dot);

/// theta2_dot [[0, -cos1, 0], [-cos1, 0, sin1], [0, sin1, 0]].
FrameMatrix cd_second_order(double theta1, double theta2_dot);

/// H_eff + H_CD^(2) in closed form.
FrameMatrix corrected_hamiltonian(double omega_prime, double theta1, double theta2_dot);

struct CorrectedPulses {
  PulseSet pulses;  // grid-interpolated corrected pair, family Corrected
  AngleSchedule angles;
  std::size_t degenerate_points = 0;
};

/// Omega~'_1 = Omega' sin1 - theta2_dot cos1, Omega~'_2 = Omega' cos1 + theta2_dot sin1.
CorrectedPulses corrected_pulses(const PulseSet& pulses, std::span<const double> grid);

}  // namespace wstate
