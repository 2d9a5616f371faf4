#include "wstate/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "wstate/errors.hpp"

namespace wstate {

namespace pt = boost::property_tree;

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"system", {"n_atoms", "lambda", "v"}},
      {"pulses", {"variant", "omega0", "duration", "t0", "tc", "vartheta", "grid", "flip_omega2"}},
      {"evolution", {"model", "steps", "record_every"}},
      {"decoherence", {"gamma", "kappa", "rydberg_ratio"}},
      {"scan", {"omega0", "kappa_over_lambda", "gamma_over_lambda", "delta_pulse", "delta_coupling", "n_atoms"}},
      {"angles", {"omega0"}},
      {"comparison", {"short_factor", "adiabatic_factor", "samples"}},
      {"fit", {"n_terms"}},
      {"output", {"path", "workers"}},
      {"physical",
       {"preset", "t_us", "lambda_mhz", "v_mhz", "omega0_mhz", "gamma_mhz", "kappa_mhz", "rydberg_mhz"}},
  };
  return keys;
}

std::map<std::string, ScanAxis> default_axes() {
  return {
      {"omega0", {"omega0", 1.0, 17.0, 160}},
      {"kappa_over_lambda", {"kappa_over_lambda", 0.0, 0.005, 41}},
      {"gamma_over_lambda", {"gamma_over_lambda", 0.0, 0.005, 41}},
      {"delta_pulse", {"delta_pulse", -0.1, 0.1, 41}},
      {"delta_coupling", {"delta_coupling", -0.1, 0.1, 41}},
      {"n_atoms", {"n_atoms", 2.0, 6.0, 5}},
  };
}

void check_keys(const pt::ptree& tree) {
  const auto& keys = known_keys();
  for (const auto& [section, child] : tree) {
    auto it = keys.find(section);
    if (it == keys.end()) {
      if (child.empty()) throw ConfigError("unexpected top-level key '" + section + "'");
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : child) {
      if (!it->second.count(key)) throw ConfigError("unknown key '" + key + "' in [" + section + "]");
    }
  }
}

template <typename T>
T read(const pt::ptree& tree, const std::string& path, T fallback) {
  // get<T>(path, fallback) silently returns the fallback on malformed data.
  if (!tree.get_optional<std::string>(path)) return fallback;
  try {
    return tree.get<T>(path);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("malformed value for " + path + ": '" + tree.get<std::string>(path) + "'");
  }
}

template <typename T>
std::optional<T> read_optional(const pt::ptree& tree, const std::string& path) {
  if (!tree.get_optional<std::string>(path)) return std::nullopt;
  try {
    return tree.get<T>(path);
  } catch (const pt::ptree_bad_data&) {
    throw ConfigError("malformed value for " + path + ": '" + tree.get<std::string>(path) + "'");
  }
}

std::size_t read_count(const pt::ptree& tree, const std::string& path, std::size_t fallback) {
  const double v = read<double>(tree, path, static_cast<double>(fallback));
  if (v < 0.0 || v != std::floor(v)) throw ConfigError(path + " must be a non-negative integer");
  return static_cast<std::size_t>(v);
}

ScanAxis parse_axis(const std::string& name, const std::string& text) {
  std::istringstream in(text);
  ScanAxis axis{name};
  double count = 0.0;
  std::string extra;
  if (!(in >> axis.min >> axis.max >> count) || (in >> extra)) {
    throw ConfigError("scan." + name + " must be \"min max count\", got '" + text + "'");
  }
  if (count < 1.0 || count != std::floor(count)) throw ConfigError("scan." + name + " count must be >= 1");
  axis.count = static_cast<std::size_t>(count);
  return axis;
}

std::vector<double> parse_list(const std::string& path, const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw ConfigError("malformed number '" + token + "' in " + path);
    }
  }
  if (out.empty()) throw ConfigError(path + " must list at least one value");
  return out;
}

bool read_bool(const pt::ptree& tree, const std::string& path, bool fallback) {
  const auto text = tree.get_optional<std::string>(path);
  if (!text) return fallback;
  if (*text == "true" || *text == "1" || *text == "yes") return true;
  if (*text == "false" || *text == "0" || *text == "no") return false;
  throw ConfigError("malformed boolean for " + path + ": '" + *text + "'");
}

void apply_physical(ExperimentConfig& cfg) {
  PhysicalInputs& p = cfg.physical;
  if (cfg.preset == "rb87") {
    if (!p.lambda_mhz) throw ConfigError("preset rb87 needs an explicit physical.lambda_mhz");
    if (!p.omega0_mhz) p.omega0_mhz = 10.0;
    if (!p.gamma_mhz) p.gamma_mhz = 3.0;
    if (!p.rydberg_mhz) p.rydberg_mhz = 1e-3;
    if (!p.kappa_mhz) p.kappa_mhz = 0.66;
  } else if (!cfg.preset.empty()) {
    throw ConfigError("unknown physical.preset '" + cfg.preset + "'");
  }
  const bool any = p.t_us || p.lambda_mhz || p.v_mhz || p.omega0_mhz || p.gamma_mhz || p.kappa_mhz || p.rydberg_mhz;
  if (!any) return;

  if (!p.t_us) {
    if (!p.omega0_mhz || !(*p.omega0_mhz > 0.0)) {
      throw ConfigError("physical inputs need t_us or a positive omega0_mhz");
    }
    p.t_us = 8.0 / (2.0 * std::numbers::pi * *p.omega0_mhz);
  }
  if (!(*p.t_us > 0.0)) throw ConfigError("physical.t_us must be positive");
  const double scale = 2.0 * std::numbers::pi * *p.t_us;
  if (p.lambda_mhz) {
    cfg.system.lambda = *p.lambda_mhz * scale;
    cfg.system.v = (p.v_mhz ? *p.v_mhz : *p.lambda_mhz) * scale;
  } else if (p.v_mhz) {
    cfg.system.v = *p.v_mhz * scale;
  }
  if (p.omega0_mhz) cfg.stirap.omega0 = *p.omega0_mhz * scale;
  if (p.gamma_mhz) cfg.rates.gamma = *p.gamma_mhz * scale;
  if (p.kappa_mhz) cfg.rates.kappa = *p.kappa_mhz * scale;
  if (p.rydberg_mhz) {
    if (!(p.gamma_mhz && *p.gamma_mhz > 0.0)) throw ConfigError("physical.rydberg_mhz needs a positive gamma_mhz");
    cfg.rates.rydberg_ratio = *p.rydberg_mhz / *p.gamma_mhz;
  }
}

ExperimentConfig from_tree(pt::ptree tree, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    const auto dot = o.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
      throw ConfigError("override must look like section.key=value, got '" + o + "'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    tree.put(trim(o.substr(0, eq)), trim(o.substr(eq + 1)));
  }
  check_keys(tree);

  ExperimentConfig cfg;
  cfg.system.n_atoms = read<int>(tree, "system.n_atoms", cfg.system.n_atoms);
  cfg.system.lambda = read<double>(tree, "system.lambda", cfg.system.lambda);
  cfg.system.v = read<double>(tree, "system.v", cfg.system.v);

  cfg.variant = tree.get<std::string>("pulses.variant", cfg.variant);
  cfg.stirap.omega0 = read<double>(tree, "pulses.omega0", cfg.stirap.omega0);
  cfg.stirap.duration = read<double>(tree, "pulses.duration", cfg.stirap.duration);
  cfg.stirap.t0 = read<double>(tree, "pulses.t0", cfg.stirap.t0);
  cfg.stirap.tc = read<double>(tree, "pulses.tc", cfg.stirap.tc);
  cfg.stirap.vartheta = read<double>(tree, "pulses.vartheta", cfg.stirap.vartheta);
  cfg.pulse_grid = read_count(tree, "pulses.grid", cfg.pulse_grid);
  cfg.flip_omega2 = read_bool(tree, "pulses.flip_omega2", cfg.flip_omega2);

  const std::string model = tree.get<std::string>("evolution.model", "full");
  if (model == "full") {
    cfg.model = ModelKind::Full;
  } else if (model == "effective") {
    cfg.model = ModelKind::Effective;
  } else {
    throw ConfigError("evolution.model must be full or effective, got '" + model + "'");
  }
  const std::string steps = tree.get<std::string>("evolution.steps", "auto");
  cfg.steps = steps == "auto" ? 0 : read_count(tree, "evolution.steps", 0);
  cfg.record_every = read_count(tree, "evolution.record_every", cfg.record_every);

  cfg.rates.gamma = read<double>(tree, "decoherence.gamma", cfg.rates.gamma);
  cfg.rates.kappa = read<double>(tree, "decoherence.kappa", cfg.rates.kappa);
  cfg.rates.rydberg_ratio = read<double>(tree, "decoherence.rydberg_ratio", cfg.rates.rydberg_ratio);

  cfg.axes = default_axes();
  if (auto scan = tree.get_child_optional("scan")) {
    for (const auto& [key, value] : *scan) cfg.axes[key] = parse_axis(key, value.data());
  }
  if (auto list = tree.get_optional<std::string>("angles.omega0")) cfg.angle_omega0 = parse_list("angles.omega0", *list);

  cfg.short_factor = read<double>(tree, "comparison.short_factor", cfg.short_factor);
  cfg.adiabatic_factor = read<double>(tree, "comparison.adiabatic_factor", cfg.adiabatic_factor);
  cfg.comparison_samples = read_count(tree, "comparison.samples", cfg.comparison_samples);

  cfg.fit_terms = read<int>(tree, "fit.n_terms", cfg.fit_terms);
  cfg.output = tree.get<std::string>("output.path", cfg.output);
  cfg.workers = static_cast<unsigned>(read_count(tree, "output.workers", cfg.workers));

  cfg.preset = tree.get<std::string>("physical.preset", "");
  PhysicalInputs& p = cfg.physical;
  p.t_us = read_optional<double>(tree, "physical.t_us");
  p.lambda_mhz = read_optional<double>(tree, "physical.lambda_mhz");
  p.v_mhz = read_optional<double>(tree, "physical.v_mhz");
  p.omega0_mhz = read_optional<double>(tree, "physical.omega0_mhz");
  p.gamma_mhz = read_optional<double>(tree, "physical.gamma_mhz");
  p.kappa_mhz = read_optional<double>(tree, "physical.kappa_mhz");
  p.rydberg_mhz = read_optional<double>(tree, "physical.rydberg_mhz");
  apply_physical(cfg);

  cfg.validate();
  return cfg;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::vector<double> ScanAxis::values() const {
  std::vector<double> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i] = count == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
  }
  if (count > 1) out.back() = max;
  return out;
}

void ExperimentConfig::validate() const {
  try {
    system.validate();
    stirap.validate();
    rates.validate();
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  const bool known_variant = variant == "stirap" || variant == "paper_fit" || variant == "corrected" ||
                             (variant.rfind("file:", 0) == 0 && variant.size() > 5);
  if (!known_variant) throw ConfigError("pulses.variant must be stirap, paper_fit, corrected or file:<path>");
  if (!(stirap.omega0 > 0.0)) throw ConfigError("pulses.omega0 must be positive");
  if (pulse_grid == 1) throw ConfigError("pulses.grid needs at least 2 intervals");
  if (record_every == 0) throw ConfigError("evolution.record_every must be positive");
  if (!(short_factor > 0.0 && adiabatic_factor > 0.0)) throw ConfigError("comparison factors must be positive");
  if (comparison_samples < 2) throw ConfigError("comparison.samples must be at least 2");
  if (fit_terms < 1) throw ConfigError("fit.n_terms must be positive");
  for (double o : angle_omega0) {
    if (!(o > 0.0)) throw ConfigError("angles.omega0 values must be positive");
  }
  for (const auto& [name, axis] : axes) {
    if (axis.count < 1) throw ConfigError("scan." + name + " needs at least one point");
  }
  const auto& n = axes.at("n_atoms");
  if (n.min < 2.0 || n.min != std::floor(n.min) || n.max != std::floor(n.max)) {
    throw ConfigError("scan.n_atoms bounds must be integers >= 2");
  }
  for (const char* name : {"kappa_over_lambda", "gamma_over_lambda"}) {
    if (axes.at(name).min < 0.0) throw ConfigError(std::string("scan.") + name + " must be non-negative");
  }
  for (const char* name : {"delta_pulse", "delta_coupling"}) {
    if (axes.at(name).min <= -1.0) throw ConfigError(std::string("scan.") + name + " must stay above -1");
  }
  if (axes.at("omega0").min <= 0.0) throw ConfigError("scan.omega0 must be positive");
  if (model == ModelKind::Effective && !rates.zero()) {
    throw ConfigError("decoherence needs the full model");
  }
}

std::size_t ExperimentConfig::resolved_steps(double duration) const {
  if (steps) return steps;
  const double scaled = 1e4 * system.lambda * duration / 80.0;
  return std::max<std::size_t>(10000, static_cast<std::size_t>(std::ceil(scaled - 1e-9)));
}

std::size_t ExperimentConfig::resolved_steps() const { return resolved_steps(stirap.duration); }

IntegratorConfig ExperimentConfig::integrator() const {
  IntegratorConfig c;
  c.steps = resolved_steps();
  c.record_every = record_every;
  return c;
}

const ScanAxis& ExperimentConfig::axis(const std::string& name) const {
  auto it = axes.find(name);
  if (it == axes.end()) throw ConfigError("no scan axis '" + name + "'");
  return it->second;
}

std::vector<std::string> ExperimentConfig::echo() const {
  std::vector<std::string> out;
  auto put = [&](const std::string& key, const std::string& value) { out.push_back(key + " = " + value); };
  put("system.n_atoms", std::to_string(system.n_atoms));
  put("system.lambda", fmt(system.lambda));
  put("system.v", fmt(system.v));
  put("pulses.variant", variant);
  put("pulses.omega0", fmt(stirap.omega0));
  put("pulses.duration", fmt(stirap.duration));
  put("pulses.t0", fmt(stirap.t0));
  put("pulses.tc", fmt(stirap.tc));
  put("pulses.vartheta", fmt(stirap.vartheta));
  put("pulses.grid", pulse_grid ? std::to_string(pulse_grid) : "steps");
  put("pulses.flip_omega2", flip_omega2 ? "true" : "false");
  put("evolution.model", model == ModelKind::Full ? "full" : "effective");
  put("evolution.steps", std::to_string(resolved_steps()));
  put("evolution.record_every", std::to_string(record_every));
  put("decoherence.gamma", fmt(rates.gamma));
  put("decoherence.kappa", fmt(rates.kappa));
  put("decoherence.rydberg_ratio", fmt(rates.rydberg_ratio));
  for (const auto& [name, a] : axes) put("scan." + name, fmt(a.min) + " " + fmt(a.max) + " " + std::to_string(a.count));
  std::string list;
  for (double o : angle_omega0) list += (list.empty() ? "" : " ") + fmt(o);
  put("angles.omega0", list);
  put("comparison.short_factor", fmt(short_factor));
  put("comparison.adiabatic_factor", fmt(adiabatic_factor));
  put("comparison.samples", std::to_string(comparison_samples));
  put("fit.n_terms", std::to_string(fit_terms));
  put("output.path", output.empty() ? "-" : output);
  if (!preset.empty()) put("physical.preset", preset);
  if (physical.t_us) put("physical.t_us", fmt(*physical.t_us));
  if (physical.lambda_mhz) put("physical.lambda_mhz", fmt(*physical.lambda_mhz));
  if (physical.v_mhz) put("physical.v_mhz", fmt(*physical.v_mhz));
  if (physical.omega0_mhz) put("physical.omega0_mhz", fmt(*physical.omega0_mhz));
  if (physical.gamma_mhz) put("physical.gamma_mhz", fmt(*physical.gamma_mhz));
  if (physical.kappa_mhz) put("physical.kappa_mhz", fmt(*physical.kappa_mhz));
  if (physical.rydberg_mhz) put("physical.rydberg_mhz", fmt(*physical.rydberg_mhz));
  return out;
}

ExperimentConfig load_config(std::istream& in, const std::vector<std::string>& overrides) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return from_tree(std::move(tree), overrides);
}

ExperimentConfig load_config_file(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  return load_config(in, overrides);
}

ExperimentConfig default_config(const std::vector<std::string>& overrides) {
  return from_tree(pt::ptree{}, overrides);
}

unsigned resolve_workers(unsigned flag, unsigned configured) {
  if (flag) return flag;
  if (const char* env = std::getenv("WSTATE_WORKERS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError(std::string("WSTATE_WORKERS must be a positive integer, got '") + env + "'");
    return static_cast<unsigned>(n);
  }
  if (configured) return configured;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace wstate
