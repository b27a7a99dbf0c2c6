#include "rydchan/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "rydchan/errors.hpp"

namespace rydchan {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  const char* first = t.data();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

IniFile IniFile::parse(const std::string& text, const std::string& origin) {
  IniFile ini;
  ini.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  const auto error = [&](const std::string& what) {
    throw ConfigError(origin + ":" + std::to_string(line) + ": " + what);
  };
  while (std::getline(in, raw)) {
    ++line;
    const auto cut = raw.find_first_of("#;");
    const std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') error("unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) error("empty section name");
      ini.sections_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) error("expected key = value");
    if (section.empty()) error("key outside of a section");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) error("empty key");
    auto& keys = ini.sections_[section];
    if (keys.count(key)) error("duplicate key '" + key + "' in [" + section + "]");
    keys[key] = {value, line};
  }
  return ini;
}

IniFile IniFile::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open configuration file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse(text.str(), path.string());
}

bool IniFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  return s != sections_.end() && s->second.count(key);
}

const IniFile::Entry& IniFile::entry(const std::string& section, const std::string& key) const {
  if (!has(section, key))
    throw ConfigError(origin_ + ": missing required key '" + key + "' in [" + section + "]");
  return sections_.at(section).at(key);
}

void IniFile::fail(const std::string& section, const std::string& key,
                   const std::string& what) const {
  const int line = has(section, key) ? entry(section, key).line : 0;
  throw ConfigError(origin_ + ":" + std::to_string(line) + ": [" + section + "] " + key + ": " +
                    what);
}

double IniFile::number(const std::string& section, const std::string& key) const {
  double v = 0.0;
  if (!parse_double(entry(section, key).value, v)) fail(section, key, "not a finite number");
  return v;
}

double IniFile::number(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

long IniFile::integer(const std::string& section, const std::string& key) const {
  const std::string t = trim(entry(section, key).value);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    fail(section, key, "not an integer");
  return v;
}

long IniFile::integer(const std::string& section, const std::string& key, long fallback) const {
  return has(section, key) ? integer(section, key) : fallback;
}

std::string IniFile::text(const std::string& section, const std::string& key,
                          const std::string& fallback) const {
  return has(section, key) ? entry(section, key).value : fallback;
}

std::vector<double> IniFile::numbers(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split(entry(section, key).value, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() == 1) {
      double v = 0.0;
      if (!parse_double(item, v)) fail(section, key, "'" + item + "' is not a finite number");
      out.push_back(v);
      continue;
    }
    double a = 0.0, step = 0.0, b = 0.0;
    if (parts.size() != 3 || !parse_double(parts[0], a) || !parse_double(parts[1], step) ||
        !parse_double(parts[2], b))
      fail(section, key, "range must read start:step:stop");
    if (step == 0.0 || (b - a) / step < 0.0) fail(section, key, "range step has the wrong sign");
    const double count = std::floor((b - a) / step + 1e-9);
    if (count > 1e6) fail(section, key, "range has too many points");
    for (long i = 0; i <= long(count); ++i) out.push_back(a + double(i) * step);
  }
  if (out.empty()) fail(section, key, "empty list");
  return out;
}

std::vector<double> TimeGrid::times() const {
  if (n_points < 1) throw ConfigError("time grid needs at least one point");
  if (n_points > 1 && !(t_max > 0.0)) throw ConfigError("time grid needs t_max > 0");
  std::vector<double> t(n_points, 0.0);
  for (long i = 1; i < n_points; ++i) t[i] = t_max * double(i) / double(n_points - 1);
  return t;
}

Eigen::Index basis_index(const std::string& label, Eigen::Index L) {
  if (Eigen::Index(label.size()) != L)
    throw ConfigError("initial state '" + label + "' must name one level per atom");
  Eigen::Index index = 0;
  for (char c : label) {
    if (c != 'g' && c != 'r') throw ConfigError("initial state letters must be g or r");
    index = 2 * index + (c == 'r');
  }
  return index;
}

namespace {

Eigen::VectorXd per_atom(const IniFile& ini, const std::string& section, const std::string& key,
                         Eigen::Index L) {
  const auto v = ini.numbers(section, key);
  if (v.size() == 1) return Eigen::VectorXd::Constant(L, v[0]);
  if (Eigen::Index(v.size()) != L)
    ini.fail(section, key, "needs one value or one per atom (" + std::to_string(L) + ")");
  return Eigen::Map<const Eigen::VectorXd>(v.data(), L);
}

std::vector<double> positive_list(const IniFile& ini, const std::string& key) {
  auto v = ini.numbers("experiment", key);
  for (double x : v)
    if (!(x > 0.0)) ini.fail("experiment", key, "values must be positive");
  return v;
}

void read_trap_axis(const IniFile& ini, ExperimentSpec& spec, double mass) {
  const bool nu = ini.has("experiment", "trap_frequencies");
  const bool sigma = ini.has("experiment", "sigma0");
  if (nu && sigma) ini.fail("experiment", "sigma0", "give trap_frequencies or sigma0, not both");
  if (nu) spec.trap_frequencies = positive_list(ini, "trap_frequencies");
  if (sigma)
    for (double s : positive_list(ini, "sigma0"))
      spec.trap_frequencies.push_back(trap_frequency_for_width(s, mass));
}

// `swept`: the detuning comes from a sweep axis, so [drive] has none.
void read_two_atom_base(const IniFile& ini, ExperimentSpec& spec, bool swept = false) {
  PhysicalParams& p = spec.base;
  p.atom_mass = ini.number("chain", "atom_mass");
  const auto centers = ini.numbers("chain", "trap_centers");
  p.trap_centers = Eigen::Map<const Eigen::VectorXd>(centers.data(), Eigen::Index(centers.size()));
  const Eigen::Index L = p.size();
  if (L < 2) ini.fail("chain", "trap_centers", "needs at least two atoms");
  p.trap_frequency = ini.number("trap", "trap_frequency");
  p.rabi = per_atom(ini, "drive", "rabi", L);
  if (ini.has("drive", "detuning") && ini.has("experiment", "detuning_over_v0"))
    ini.fail("experiment", "detuning_over_v0", "conflicts with [drive] detuning");
  if (swept) {
    p.detuning = Eigen::VectorXd::Zero(L);
  } else if (ini.has("experiment", "detuning_over_v0")) {
    spec.set_detuning_ratio = true;
    spec.detuning_ratio = ini.number("experiment", "detuning_over_v0");
    p.detuning = Eigen::VectorXd::Zero(L);
  } else {
    p.detuning = per_atom(ini, "drive", "detuning", L);
  }
  p.interaction_coefficient = ini.number("interaction", "interaction_coefficient");
  const long alpha = ini.integer("interaction", "interaction_exponent");
  if (alpha != 3 && alpha != 6) ini.fail("interaction", "interaction_exponent", "must be 3 or 6");
  p.interaction_exponent = int(alpha);
  try {
    validate(p);
  } catch (const ConfigError& e) {
    throw ConfigError(ini.origin() + ": " + e.what());
  }
  if (L != 2) ini.fail("chain", "trap_centers", "two-atom experiments need exactly two atoms");
}

void read_common(const IniFile& ini, ExperimentSpec& spec) {
  spec.exact_points = ini.integer("experiment", "exact_points", 2048);
  if (spec.exact_points < 64 || (spec.exact_points & (spec.exact_points - 1)))
    ini.fail("experiment", "exact_points", "must be a power of two >= 64");
  spec.exact_extent = ini.number("experiment", "exact_extent", 40.0);
  if (!(spec.exact_extent > 0.0)) ini.fail("experiment", "exact_extent", "must be positive");
  spec.exact_dt = ini.number("experiment", "exact_dt", 0.0);
  if (spec.exact_dt < 0.0) ini.fail("experiment", "exact_dt", "must not be negative");
}

}  // namespace

ExperimentSpec read_experiment(const IniFile& ini, const std::string& command) {
  ExperimentSpec spec;
  spec.command = command;
  spec.config_path = ini.origin();
  read_common(ini, spec);

  if (command == "two-atom") {
    read_two_atom_base(ini, spec);
    spec.time.t_max = ini.number("experiment", "t_max");
    spec.time.n_points = ini.integer("experiment", "n_points");
    if (spec.time.n_points < 1) ini.fail("experiment", "n_points", "must be at least 1");
    if (spec.time.n_points > 1 && !(spec.time.t_max > 0.0))
      ini.fail("experiment", "t_max", "must be positive");
    if (ini.has("experiment", "spacings")) spec.spacings = positive_list(ini, "spacings");
    read_trap_axis(ini, spec, spec.base.atom_mass);
    spec.initial_state = ini.text("experiment", "initial_state", "gg");
    basis_index(spec.initial_state, 2);
    if (ini.has("experiment", "cycle_thresholds")) {
      spec.cycle_thresholds = ini.numbers("experiment", "cycle_thresholds");
      for (double t : spec.cycle_thresholds)
        if (t < 0.0 || t > 1.0) ini.fail("experiment", "cycle_thresholds", "must lie in [0, 1]");
    }
  } else if (command == "detuning-sweep") {
    if (ini.has("drive", "detuning"))
      ini.fail("drive", "detuning", "the sweep sets the detuning; remove this key");
    if (ini.has("experiment", "detuning_over_v0"))
      ini.fail("experiment", "detuning_over_v0", "use detuning_over_v0_grid for a sweep");
    read_two_atom_base(ini, spec, true);
    spec.detuning_ratios = ini.numbers("experiment", "detuning_over_v0_grid");
    for (double r : spec.detuning_ratios)
      if (r == 0.0 || r == 1.0)
        ini.fail("experiment", "detuning_over_v0_grid",
                 "grid contains a pole of J (Delta = 0 or Delta = V)");
    spec.initial_state = ini.text("experiment", "initial_state", "rg");
    basis_index(spec.initial_state, 2);
    spec.fidelity_loss_threshold = ini.number("experiment", "fidelity_threshold", 0.8);
    if (!(spec.fidelity_loss_threshold > 0.0 && spec.fidelity_loss_threshold < 1.0))
      ini.fail("experiment", "fidelity_threshold", "must lie in (0, 1)");
  } else if (command == "transport" || command == "crossover") {
    TransportPhysics& t = spec.transport;
    t.atom_mass = ini.number("chain", "atom_mass");
    t.spacing = ini.number("chain", "spacing");
    if (!(t.atom_mass > 0.0)) ini.fail("chain", "atom_mass", "must be positive");
    if (!(t.spacing > 0.0)) ini.fail("chain", "spacing", "must be positive");
    t.interaction_coefficient = ini.number("interaction", "interaction_coefficient");
    if (!(t.interaction_coefficient > 0.0))
      ini.fail("interaction", "interaction_coefficient", "must be positive");
    const long alpha = ini.integer("interaction", "interaction_exponent");
    if (alpha != 3 && alpha != 6) ini.fail("interaction", "interaction_exponent", "must be 3 or 6");
    t.alpha = int(alpha);
    t.delta_over_v = ini.number("drive", "detuning_over_v0");
    if (t.delta_over_v == 0.0 || t.delta_over_v == 1.0)
      ini.fail("drive", "detuning_over_v0", "is a pole of J");
    t.omega_over_delta = ini.number("drive", "rabi_over_detuning");
    if (!(t.omega_over_delta > 0.0)) ini.fail("drive", "rabi_over_detuning", "must be positive");
    read_trap_axis(ini, spec, t.atom_mass);
    if (spec.trap_frequencies.empty())
      ini.fail("experiment", "trap_frequencies", "needs trap_frequencies or sigma0");
    for (double l : ini.numbers("experiment", "lengths")) {
      if (l != std::floor(l) || l < 2) ini.fail("experiment", "lengths", "must be integers >= 2");
      spec.lengths.push_back(Eigen::Index(l));
    }
  } else if (command != "check") {
    throw ConfigError("unknown experiment '" + command + "'");
  }
  return spec;
}

}  // namespace rydchan
