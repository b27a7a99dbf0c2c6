#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "rydchan/transport.hpp"
#include "rydchan/units.hpp"

namespace rydchan {

/// Sectioned key = value file. '#' and ';' start comments, keys are case
/// sensitive, a repeated key is an error. Every value remembers its line so
/// that errors point at the file position.
class IniFile {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static IniFile parse(const std::string& text, const std::string& origin = "<string>");
  static IniFile load(const std::filesystem::path& path);

  bool has(const std::string& section, const std::string& key) const;
  const Entry& entry(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key) const;
  double number(const std::string& section, const std::string& key, double fallback) const;
  long integer(const std::string& section, const std::string& key) const;
  long integer(const std::string& section, const std::string& key, long fallback) const;
  std::string text(const std::string& section, const std::string& key,
                   const std::string& fallback) const;

  /// Comma-separated numbers; an item "a:step:b" expands to a, a+step, ...
  /// up to b (inclusive within 1e-9 of the step).
  std::vector<double> numbers(const std::string& section, const std::string& key) const;

  /// Throws ConfigError naming `where` (file:line) and `what`.
  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& what) const;

  const std::string& origin() const { return origin_; }

 private:
  std::string origin_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
};

/// Output times 0, t_max/(n-1), ..., t_max (seconds). n = 1 gives {0}.
struct TimeGrid {
  double t_max = 0.0;
  long n_points = 1;

  std::vector<double> times() const;
};

/// One experiment as read from a configuration file plus command-line
/// overrides. Physical inputs are SI; sweep axes replace the corresponding
/// base values point by point.
struct ExperimentSpec {
  std::string command;
  std::filesystem::path config_path;
  std::filesystem::path out_dir = ".";

  PhysicalParams base;  // [chain] [trap] [drive] [interaction]
  TimeGrid time;

  std::vector<double> spacings;          // m
  std::vector<double> trap_frequencies;  // Hz, also filled from sigma0 lists
  std::vector<double> detuning_ratios;   // Delta / V^(0)
  std::vector<Eigen::Index> lengths;

  std::string initial_state = "gg";
  double detuning_ratio = 0.0;  // used when set_detuning_ratio is true
  bool set_detuning_ratio = false;
  std::vector<double> cycle_thresholds;
  double fidelity_loss_threshold = 0.8;

  TransportPhysics transport;

  Eigen::Index exact_points = 2048;
  double exact_extent = 40.0;
  double exact_dt = 0.0;  // normalized; 0 = automatic

  int threads = 1;
  bool dephasing = true;
  bool exact = false;
};

/// Builds the spec of `command` from a parsed file. Throws ConfigError with
/// file and line context on any missing or invalid entry.
ExperimentSpec read_experiment(const IniFile& ini, const std::string& command);

/// The computational basis index named by a two-letter string such as "rg".
Eigen::Index basis_index(const std::string& label, Eigen::Index L);

}  // namespace rydchan
