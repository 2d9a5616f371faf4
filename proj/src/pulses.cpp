#include "wstate/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wstate/errors.hpp"

namespace wstate {

void GaussianSumParams::validate() const {
  for (const auto& term : terms) {
    if (!(term.width > 0.0)) throw std::invalid_argument("Gaussian width must be positive");
  }
}

GaussianSum::GaussianSum(GaussianSumParams params) : params_(std::move(params)) { params_.validate(); }

double GaussianSum::value(double t) const {
  double sum = 0.0;
  for (const auto& g : params_.terms) {
    const double x = (t - g.center) / g.width;
    sum += g.amplitude * std::exp(-x * x);
  }
  return params_.sign * sum;
}

double GaussianSum::derivative(double t) const {
  double sum = 0.0;
  for (const auto& g : params_.terms) {
    const double x = (t - g.center) / g.width;
    sum += -2.0 * x / g.width * g.amplitude * std::exp(-x * x);
  }
  return params_.sign * sum;
}

SampledSchedule::SampledSchedule(std::vector<double> grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() != values_.size() || grid_.size() < 2) {
    throw std::invalid_argument("sampled schedule needs matching grid/value arrays of length >= 2");
  }
  if (!std::is_sorted(grid_.begin(), grid_.end()) ||
      std::adjacent_find(grid_.begin(), grid_.end()) != grid_.end()) {
    throw std::invalid_argument("sampled schedule grid must be strictly increasing");
  }
}

std::size_t SampledSchedule::segment(double t) const {
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  std::size_t i = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
  return std::min(i, grid_.size() - 2);
}

double SampledSchedule::value(double t) const {
  if (t <= grid_.front()) return values_.front();
  if (t >= grid_.back()) return values_.back();
  const std::size_t i = segment(t);
  const double w = (t - grid_[i]) / (grid_[i + 1] - grid_[i]);
  return (1.0 - w) * values_[i] + w * values_[i + 1];
}

double SampledSchedule::derivative(double t) const {
  if (t < grid_.front() || t > grid_.back()) return 0.0;
  const std::size_t i = segment(t);
  return (values_[i + 1] - values_[i]) / (grid_[i + 1] - grid_[i]);
}

double Schedule::value(double t) const {
  return std::visit([t](const auto& s) { return s.value(t); }, impl_);
}

double Schedule::derivative(double t) const {
  return std::visit([t](const auto& s) { return s.derivative(t); }, impl_);
}

Schedule Schedule::scaled(double factor) const {
  if (const auto* g = std::get_if<GaussianSum>(&impl_)) {
    GaussianSumParams p = g->params();
    p.sign *= factor;
    return GaussianSum(std::move(p));
  }
  const auto& sampled = std::get<SampledSchedule>(impl_);
  std::vector<double> v = sampled.values();
  for (double& x : v) x *= factor;
  return SampledSchedule(sampled.grid(), std::move(v));
}

std::string to_string(PulseFamily family) {
  switch (family) {
    case PulseFamily::Stirap: return "stirap";
    case PulseFamily::GaussianFit: return "gaussian_fit";
    case PulseFamily::Corrected: return "corrected";
    case PulseFamily::Custom: return "custom";
  }
  return "custom";
}

PulseSet::PulseSet(Schedule omega1, Schedule omega2, double duration, PulseFamily family)
    : omega1_(std::move(omega1)), omega2_(std::move(omega2)), duration_(duration), family_(family) {
  if (!(duration > 0.0)) throw std::invalid_argument("pulse duration must be positive");
}

PulseSet PulseSet::scaled(double delta1, double delta2) const {
  return PulseSet(omega1_.scaled(1.0 + delta1), omega2_.scaled(1.0 + delta2), duration_, family_);
}

void StirapParams::validate() const {
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (!(tc > 0.0)) throw std::invalid_argument("tc must be positive");
  if (!(t0 > 0.0 && t0 < 0.5)) throw std::invalid_argument("t0 must lie in (0, T/2)");
}

PulseSet stirap_pulses(const StirapParams& p) {
  p.validate();
  const double late = p.duration * (0.5 + p.t0);
  const double early = p.duration * (0.5 - p.t0);
  const double width = p.tc * p.duration;
  GaussianSumParams one{{{std::sin(p.vartheta) * p.omega0, late, width}}, 1.0};
  GaussianSumParams two{{{p.omega0, early, width}, {std::cos(p.vartheta) * p.omega0, late, width}}, 1.0};
  return PulseSet(GaussianSum(std::move(one)), GaussianSum(std::move(two)), p.duration, PulseFamily::Stirap);
}

PulseSet gaussian_sum_pulses(const GaussianSumParams& omega1, const GaussianSumParams& omega2, double duration) {
  return PulseSet(GaussianSum(omega1), GaussianSum(omega2), duration, PulseFamily::GaussianFit);
}

namespace {

GaussianSumParams rescaled(std::vector<GaussianTerm> unit_terms, double sign, double duration) {
  for (auto& g : unit_terms) {
    g.amplitude /= duration;
    g.center *= duration;
    g.width *= duration;
  }
  return {std::move(unit_terms), sign};
}

}  // namespace

GaussianSumParams reference_fit_omega1(double duration) {
  return rescaled({{5.912, 0.6838, 0.1561}, {4.784, 0.4265, 0.09342}}, 1.0, duration);
}

GaussianSumParams reference_fit_omega2(double duration, bool flip_omega2) {
  return rescaled({{7.590, 0.5857, 0.1888}, {7.111, 0.3132, 0.1538}}, flip_omega2 ? 1.0 : -1.0, duration);
}

PulseSet reference_fit_pulses(double duration, bool flip_omega2) {
  return gaussian_sum_pulses(reference_fit_omega1(duration), reference_fit_omega2(duration, flip_omega2), duration);
}

// --- presets -------------------------------------------------------------

namespace {

// get<T>(key, fallback) would hide malformed values behind the fallback.
double number_or(const boost::property_tree::ptree& tree, const std::string& key, double fallback) {
  if (!tree.get_optional<std::string>(key)) return fallback;
  return tree.get<double>(key);
}

std::string format_terms(const GaussianSumParams& p) {
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    if (i) os << "; ";
    os << p.terms[i].amplitude << ' ' << p.terms[i].center << ' ' << p.terms[i].width;
  }
  return os.str();
}

GaussianSumParams parse_terms(const boost::property_tree::ptree& section, const std::string& name) {
  GaussianSumParams p;
  p.sign = number_or(section, "sign", 1.0);
  std::string text = section.get<std::string>("terms", "");
  std::replace(text.begin(), text.end(), ';', '\n');
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ls(line);
    GaussianTerm g;
    if (!(ls >> g.amplitude >> g.center >> g.width)) {
      throw ConfigError("malformed Gaussian term in [" + name + "]: '" + line + "'");
    }
    p.terms.push_back(g);
  }
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("[" + name + "]: " + e.what());
  }
  return p;
}

}  // namespace

void write_preset(std::ostream& out, const StirapParams& p) {
  out << std::setprecision(17);
  out << "family = stirap\n"
      << "omega0 = " << p.omega0 << '\n'
      << "vartheta = " << p.vartheta << '\n'
      << "t0 = " << p.t0 << '\n'
      << "tc = " << p.tc << '\n'
      << "duration = " << p.duration << '\n';
}

void write_preset(std::ostream& out, const GaussianSumParams& omega1, const GaussianSumParams& omega2,
                  double duration) {
  out << std::setprecision(17);
  out << "family = gaussian_fit\n"
      << "duration = " << duration << "\n\n"
      << "[omega1]\nsign = " << omega1.sign << "\nterms = " << format_terms(omega1) << "\n\n"
      << "[omega2]\nsign = " << omega2.sign << "\nterms = " << format_terms(omega2) << '\n';
}

PulseSet PulsePreset::make() const {
  if (family == PulseFamily::Stirap) return stirap_pulses(stirap);
  return gaussian_sum_pulses(omega1, omega2, duration);
}

PulsePreset read_preset(std::istream& in) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("pulse preset: ") + e.what());
  }
  PulsePreset preset;
  const std::string family = tree.get<std::string>("family", "");
  try {
    if (family == "stirap") {
      preset.family = PulseFamily::Stirap;
      preset.stirap.omega0 = number_or(tree, "omega0", preset.stirap.omega0);
      preset.stirap.vartheta = number_or(tree, "vartheta", preset.stirap.vartheta);
      preset.stirap.t0 = number_or(tree, "t0", preset.stirap.t0);
      preset.stirap.tc = number_or(tree, "tc", preset.stirap.tc);
      preset.stirap.duration = number_or(tree, "duration", preset.stirap.duration);
      preset.duration = preset.stirap.duration;
      preset.stirap.validate();
    } else if (family == "gaussian_fit") {
      preset.family = PulseFamily::GaussianFit;
      preset.duration = number_or(tree, "duration", 1.0);
      preset.omega1 = parse_terms(tree.get_child("omega1", {}), "omega1");
      preset.omega2 = parse_terms(tree.get_child("omega2", {}), "omega2");
    } else {
      throw ConfigError("pulse preset: unknown family '" + family + "'");
    }
  } catch (const pt::ptree_bad_data& e) {
    throw ConfigError(std::string("pulse preset: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pulse preset: ") + e.what());
  }
  return preset;
}

PulsePreset read_preset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pulse preset '" + path + "'");
  return read_preset(in);
}

}  // namespace wstate
