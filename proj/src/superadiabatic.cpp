#include "wstate/superadiabatic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace wstate {

namespace {

constexpr Complex kI{0.0, 1.0};
const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

// Second-order central differences on a possibly non-uniform grid, one-sided
// first-order differences at the ends.
std::vector<double> grid_derivative(std::span<const double> t, const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> d(n, 0.0);
  if (n < 2) return d;
  d.front() = (f[1] - f[0]) / (t[1] - t[0]);
  d.back() = (f[n - 1] - f[n - 2]) / (t[n - 1] - t[n - 2]);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h1 = t[i] - t[i - 1];
    const double h2 = t[i + 1] - t[i];
    d[i] = (h1 * h1 * f[i + 1] - h2 * h2 * f[i - 1] + (h2 * h2 - h1 * h1) * f[i]) / (h1 * h2 * (h1 + h2));
  }
  return d;
}

}  // namespace

std::vector<double> uniform_grid(double duration, std::size_t intervals) {
  if (intervals < 1) throw std::invalid_argument("grid needs at least one interval");
  std::vector<double> grid(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) grid[i] = duration * static_cast<double>(i) / intervals;
  grid.back() = duration;
  return grid;
}

MixingAngle mixing_angle(const PulseSet& pulses, double t) {
  const double o1 = pulses.omega1(t);
  const double o2 = pulses.omega2(t);
  const double op2 = o1 * o1 + o2 * o2;
  MixingAngle out{std::atan2(o1, o2), 0.0, std::sqrt(op2)};
  if (op2 > 0.0) out.theta1_dot = (pulses.omega1_dot(t) * o2 - o1 * pulses.omega2_dot(t)) / op2;
  return out;
}

AngleSchedule compute_angles(const PulseSet& pulses, std::span<const double> grid, double epsilon_scale) {
  if (grid.size() < 2) throw std::invalid_argument("angle grid needs at least two samples");
  if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("angle grid must be increasing");

  const std::size_t n = grid.size();
  AngleSchedule s;
  s.grid.assign(grid.begin(), grid.end());
  s.theta1.resize(n);
  s.theta1_dot.resize(n);
  s.theta2.resize(n);
  s.omega_prime.resize(n);
  s.omega_dprime.resize(n);
  s.degenerate.assign(n, false);

  std::vector<double> o1(n), o2(n);
  double peak = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    o1[i] = pulses.omega1(grid[i]);
    o2[i] = pulses.omega2(grid[i]);
    s.omega_prime[i] = std::hypot(o1[i], o2[i]);
    peak = std::max(peak, s.omega_prime[i]);
  }
  const double eps = epsilon_scale * (peak > 0.0 ? peak : 1.0);

  double previous = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double op = s.omega_prime[i];
    double theta = previous;
    double rate = 0.0;
    if (op >= eps) {
      theta = std::atan2(o1[i], o2[i]);
      if (i > 0) {
        while (theta - previous > std::numbers::pi) theta -= 2.0 * std::numbers::pi;
        while (theta - previous < -std::numbers::pi) theta += 2.0 * std::numbers::pi;
      }
      rate = (pulses.omega1_dot(grid[i]) * o2[i] - o1[i] * pulses.omega2_dot(grid[i])) / (op * op);
    }
    s.theta1[i] = theta;
    s.theta1_dot[i] = rate;
    previous = theta;

    if (op < eps && std::abs(rate) < eps) {
      s.theta2[i] = 0.0;
      s.degenerate[i] = true;
      ++s.degenerate_count;
    } else {
      s.theta2[i] = std::atan2(std::abs(rate), op);
    }
    if (rate > 0.0) ++s.rising_samples;
    s.omega_dprime[i] = std::sqrt(op * op + rate * rate);
  }
  s.theta2_dot = grid_derivative(grid, s.theta2);
  return s;
}

FrameMatrix transform_a1(double theta1) {
  const double s = std::sin(theta1);
  const double c = std::cos(theta1);
  FrameMatrix a;
  a << c, s * kInvSqrt2, s * kInvSqrt2,
       0.0, kInvSqrt2, -kInvSqrt2,
       -s, c * kInvSqrt2, c * kInvSqrt2;
  return a;
}

FrameMatrix first_picture_hamiltonian(double omega_prime, double theta1_dot) {
  const Complex g = -kI * theta1_dot * kInvSqrt2;
  FrameMatrix h = FrameMatrix::Zero();
  h(1, 1) = omega_prime;
  h(2, 2) = -omega_prime;
  h(0, 1) = h(0, 2) = g;
  h(1, 0) = h(2, 0) = -g;
  return h;
}

FrameMatrix cd_first_order(double theta1_dot) {
  FrameMatrix h = FrameMatrix::Zero();
  h(0, 2) = kI * theta1_dot;
  h(2, 0) = -kI * theta1_dot;
  return h;
}

FrameMatrix transform_a2(double theta2) {
  const double s = std::sin(theta2);
  const double c = std::cos(theta2);
  FrameMatrix a;
  a << -kI * c, kI * s * kInvSqrt2, -kI * s * kInvSqrt2,
       s * kInvSqrt2, 0.5 * (1.0 + c), 0.5 * (1.0 - c),
       -s * kInvSqrt2, 0.5 * (1.0 - c), 0.5 * (1.0 + c);
  return a;
}

FrameMatrix transform_a2_as_printed(double theta2) {
  const double s = std::sin(theta2);
  const double c = std::cos(theta2);
  FrameMatrix a;
  a << -kI * s, -kI * c * kInvSqrt2, kI * c * kInvSqrt2,
       -c * kInvSqrt2, 0.5 * (1.0 + s), 0.5 * (1.0 - s),
       c * kInvSqrt2, 0.5 * (1.0 - s), 0.5 * (1.0 + s);
  return a;
}

FrameMatrix second_picture_hamiltonian(double omega_dprime, double theta2_dot) {
  const Complex g = -kI * theta2_dot * kInvSqrt2;
  FrameMatrix h = FrameMatrix::Zero();
  h(1, 1) = omega_dprime;
  h(2, 2) = -omega_dprime;
  h(0, 1) = -g;
  h(0, 2) = g;
  h(1, 0) = g;
  h(2, 0) = -g;
  return h;
}

FrameMatrix cd_second_order(double theta1, double theta2_dot) {
  const double s = std::sin(theta1);
  const double c = std::cos(theta1);
  FrameMatrix h = FrameMatrix::Zero();
  h(0, 1) = h(1, 0) = -theta2_dot * c;
  h(1, 2) = h(2, 1) = theta2_dot * s;
  return h;
}

FrameMatrix corrected_hamiltonian(double omega_prime, double theta1, double theta2_dot) {
  return effective_hamiltonian(omega_prime * std::sin(theta1), omega_prime * std::cos(theta1)) +
         cd_second_order(theta1, theta2_dot);
}

CorrectedPulses corrected_pulses(const PulseSet& pulses, std::span<const double> grid) {
  AngleSchedule angles = compute_angles(pulses, grid);
  const std::size_t n = angles.size();
  std::vector<double> one(n), two(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = std::sin(angles.theta1[i]);
    const double c = std::cos(angles.theta1[i]);
    one[i] = angles.omega_prime[i] * s - angles.theta2_dot[i] * c;
    two[i] = angles.omega_prime[i] * c + angles.theta2_dot[i] * s;
  }
  PulseSet out(SampledSchedule(angles.grid, std::move(one)), SampledSchedule(angles.grid, std::move(two)),
               pulses.duration(), PulseFamily::Corrected);
  const std::size_t degenerate = angles.degenerate_count;
  return {std::move(out), std::move(angles), degenerate};
}

}  // namespace wstate
