#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include <Eigen/Dense>
#include <unsupported/Eigen/NonLinearOptimization>

#include "wstate/pulses.hpp"

namespace wstate {

namespace {

// Residuals r_i = model(t_i) - y_i for parameters (c_1, m_1, n_1, c_2, ...).
struct GaussianResiduals {
  using Scalar = double;
  enum { InputsAtCompileTime = Eigen::Dynamic, ValuesAtCompileTime = Eigen::Dynamic };
  using InputType = Eigen::VectorXd;
  using ValueType = Eigen::VectorXd;
  using JacobianType = Eigen::MatrixXd;

  const std::vector<double>& t;
  const std::vector<double>& y;
  int n_params;

  int inputs() const { return n_params; }
  int values() const { return static_cast<int>(t.size()); }

  int operator()(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    for (int i = 0; i < values(); ++i) {
      double m = 0.0;
      for (int k = 0; k < n_params; k += 3) {
        const double u = (t[i] - x(k + 1)) / x(k + 2);
        m += x(k) * std::exp(-u * u);
      }
      r(i) = m - y[i];
    }
    return 0;
  }

  int df(const Eigen::VectorXd& x, Eigen::MatrixXd& jac) const {
    for (int i = 0; i < values(); ++i) {
      for (int k = 0; k < n_params; k += 3) {
        const double w = x(k + 2);
        const double u = (t[i] - x(k + 1)) / w;
        const double e = std::exp(-u * u);
        jac(i, k) = e;
        jac(i, k + 1) = x(k) * e * 2.0 * u / w;
        jac(i, k + 2) = x(k) * e * 2.0 * u * u / w;
      }
    }
    return 0;
  }
};

}  // namespace

FitReport fit_gaussian_sum(std::span<const Sample> samples, int n_terms, const FitOptions& options) {
  if (n_terms < 1) throw std::invalid_argument("n_terms must be positive");

  // Deduplicate by averaging values that share a time stamp.
  std::map<double, std::pair<double, int>> merged;
  for (const auto& s : samples) {
    auto& slot = merged[s.t];
    slot.first += s.value;
    slot.second += 1;
  }
  std::vector<double> t, y;
  t.reserve(merged.size());
  y.reserve(merged.size());
  for (const auto& [time, acc] : merged) {
    t.push_back(time);
    y.push_back(acc.first / acc.second);
  }
  if (t.size() < static_cast<std::size_t>(3 * n_terms)) {
    throw std::invalid_argument("fit_gaussian_sum needs at least 3 samples per term");
  }

  const double span = t.back() - t.front();
  const std::size_t count = t.size();

  // Interior local maxima of |y|, largest first.
  std::vector<std::size_t> peaks;
  for (std::size_t i = 1; i + 1 < count; ++i) {
    const double a = std::abs(y[i]);
    if (a >= std::abs(y[i - 1]) && a > std::abs(y[i + 1])) peaks.push_back(i);
  }
  std::stable_sort(peaks.begin(), peaks.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(y[a]) > std::abs(y[b]); });

  const int n_params = 3 * n_terms;
  Eigen::VectorXd x(n_params);
  for (int k = 0; k < n_terms; ++k) {
    std::size_t idx;
    if (static_cast<std::size_t>(k) < peaks.size()) {
      idx = peaks[k];
    } else {
      // Not enough peaks: spread the remaining centers evenly.
      idx = static_cast<std::size_t>((k + 1.0) / (n_terms + 1.0) * (count - 1));
    }
    x(3 * k) = y[idx];
    x(3 * k + 1) = t[idx];
    x(3 * k + 2) = options.initial_width_fraction * span;
  }

  GaussianResiduals functor{t, y, n_params};
  Eigen::LevenbergMarquardt<GaussianResiduals> lm(functor);
  lm.parameters.ftol = options.tolerance;
  lm.parameters.xtol = options.tolerance;
  lm.parameters.maxfev = options.max_iterations * (n_params + 1);
  const auto status = lm.minimize(x);

  FitReport report;
  report.iterations = static_cast<int>(lm.iter);
  using namespace Eigen::LevenbergMarquardtSpace;
  report.converged = status == RelativeReductionTooSmall || status == RelativeErrorTooSmall ||
                     status == RelativeErrorAndReductionTooSmall || status == CosinusTooSmall;

  Eigen::VectorXd residual(count);
  functor(x, residual);
  report.rms_residual = std::sqrt(residual.squaredNorm() / static_cast<double>(count));
  report.max_residual = residual.cwiseAbs().maxCoeff();
  for (double v : y) report.peak_amplitude = std::max(report.peak_amplitude, std::abs(v));

  report.params.sign = 1.0;
  for (int k = 0; k < n_terms; ++k) {
    report.params.terms.push_back({x(3 * k), x(3 * k + 1), std::abs(x(3 * k + 2))});
  }
  if (std::any_of(report.params.terms.begin(), report.params.terms.end(),
                  [](const GaussianTerm& g) { return !(g.width > 0.0) || !std::isfinite(g.amplitude); })) {
    report.converged = false;
  }
  return report;
}

}  // namespace wstate
