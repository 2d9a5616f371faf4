#pragma once

#include <iosfwd>
#include <numbers>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace wstate {

struct GaussianTerm {
  double amplitude = 0.0;  // c, 1/T
  double center = 0.0;     // m, T
  double width = 1.0;      // n, T
};

/// sign * sum_i c_i exp(-(t - m_i)^2 / n_i^2)
struct GaussianSumParams {
  std::vector<GaussianTerm> terms;
  double sign = 1.0;

  /// Throws std::invalid_argument when any width is non-positive.
  void validate() const;
};

class GaussianSum {
 public:
  GaussianSum() = default;
  explicit GaussianSum(GaussianSumParams params);

  double value(double t) const;
  double derivative(double t) const;
  const GaussianSumParams& params() const { return params_; }

 private:
  GaussianSumParams params_;
};

/// Samples on an increasing grid, linearly interpolated; constant beyond ends.
class SampledSchedule {
 public:
  SampledSchedule() = default;
  SampledSchedule(std::vector<double> grid, std::vector<double> values);

  double value(double t) const;
  /// Slope of the interpolant (one-sided at joints, taken from the right).
  double derivative(double t) const;
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::size_t segment(double t) const;

  std::vector<double> grid_;
  std::vector<double> values_;
};

class Schedule {
 public:
  Schedule() = default;
  Schedule(GaussianSum g) : impl_(std::move(g)) {}
  Schedule(SampledSchedule s) : impl_(std::move(s)) {}

  double value(double t) const;
  double derivative(double t) const;
  Schedule scaled(double factor) const;
  bool is_sampled() const { return std::holds_alternative<SampledSchedule>(impl_); }
  const GaussianSum* gaussian() const { return std::get_if<GaussianSum>(&impl_); }

 private:
  std::variant<GaussianSum, SampledSchedule> impl_;
};

enum class PulseFamily { Stirap, GaussianFit, Corrected, Custom };

std::string to_string(PulseFamily family);

/// Effective-frame drive pair (Omega'_1, Omega'_2) on [0, duration].
class PulseSet {
 public:
  PulseSet(Schedule omega1, Schedule omega2, double duration, PulseFamily family);

  double omega1(double t) const { return omega1_.value(t); }
  double omega2(double t) const { return omega2_.value(t); }
  double omega1_dot(double t) const { return omega1_.derivative(t); }
  double omega2_dot(double t) const { return omega2_.derivative(t); }

  const Schedule& schedule1() const { return omega1_; }
  const Schedule& schedule2() const { return omega2_; }
  double duration() const { return duration_; }
  PulseFamily family() const { return family_; }

  /// Multiplies each schedule by (1 + delta).
  PulseSet scaled(double delta1, double delta2) const;

 private:
  Schedule omega1_;
  Schedule omega2_;
  double duration_;
  PulseFamily family_;
};

struct StirapParams {
  double omega0 = 8.0;                          // 1/T
  double vartheta = -std::numbers::pi / 3.0;    // final mixing angle
  double t0 = 0.14;                             // offset, fraction of duration
  double tc = 0.19;                             // width, fraction of duration
  double duration = 1.0;                        // T

  void validate() const;
};

/// Omega'_1 = sin(vartheta) Omega0 G(t0 + T/2),
/// Omega'_2 = Omega0 G(T/2 - t0) + cos(vartheta) Omega0 G(t0 + T/2),
/// G(c) = exp(-(t - c)^2 / tc^2).
PulseSet stirap_pulses(const StirapParams& params);

PulseSet gaussian_sum_pulses(const GaussianSumParams& omega1, const GaussianSumParams& omega2,
                             double duration);

/// Printed two-term fits in units of T = 1, rescaled to `duration`:
///   omega1: (5.912, 0.6838, 0.1561), (4.784, 0.4265, 0.09342)
///   omega2: -(7.590, 0.5857, 0.1888), -(7.111, 0.3132, 0.1538)
/// `flip_omega2` drops the leading minus on omega2.
GaussianSumParams reference_fit_omega1(double duration = 1.0);
GaussianSumParams reference_fit_omega2(double duration = 1.0, bool flip_omega2 = false);
PulseSet reference_fit_pulses(double duration = 1.0, bool flip_omega2 = false);

// --- curve fitting -------------------------------------------------------

struct FitOptions {
  int max_iterations = 400;
  /// Initial widths as a fraction of the sample span.
  double initial_width_fraction = 0.15;
  double tolerance = 1e-12;
};

struct FitReport {
  GaussianSumParams params;  // sign folded into the amplitudes (sign = +1)
  double rms_residual = 0.0;
  double max_residual = 0.0;
  double peak_amplitude = 0.0;  // max |sample|
  int iterations = 0;
  bool converged = false;

  double relative_rms() const { return peak_amplitude > 0 ? rms_residual / peak_amplitude : 0.0; }
};

struct Sample {
  double t;
  double value;
};

/// Least-squares fit of an n-term Gaussian sum (Levenberg-Marquardt).
/// Initial centers at the n largest local maxima of |samples|, widths at
/// `initial_width_fraction` of the span, amplitudes from the sample values.
/// Duplicate t values are averaged. Throws std::invalid_argument when fewer
/// than 3 * n_terms distinct samples are given.
FitReport fit_gaussian_sum(std::span<const Sample> samples, int n_terms, const FitOptions& options = {});

// --- preset files --------------------------------------------------------

/// Key/value preset text:
///
///   family = stirap          (omega0, vartheta, t0, tc, duration)
///   family = gaussian_fit    ([omega1]/[omega2] sections: sign, terms = "c m n; c m n")
///
/// Amplitudes in 1/T, times in T.
void write_preset(std::ostream& out, const StirapParams& params);
void write_preset(std::ostream& out, const GaussianSumParams& omega1, const GaussianSumParams& omega2,
                  double duration);

struct PulsePreset {
  PulseFamily family = PulseFamily::Stirap;
  StirapParams stirap;
  GaussianSumParams omega1;
  GaussianSumParams omega2;
  double duration = 1.0;

  PulseSet make() const;
};

/// Throws ConfigError on malformed input.
PulsePreset read_preset(std::istream& in);
PulsePreset read_preset_file(const std::string& path);

}  // namespace wstate
