#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "rydchan/config.hpp"
#include "rydchan/dynamics.hpp"
#include "rydchan/exact_oracle.hpp"

namespace rydchan {

/// A chain with everything the channel needs, built once per parameter point.
struct ChainSystem {
  NormalizedChain chain;
  EigenSystem<double> es;
  DisentangledModes modes;
};

ChainSystem prepare_system(const PhysicalParams& p);

/// Copy of `p` with every detuning set to ratio * V^(0) of the first bond.
PhysicalParams with_detuning_ratio(PhysicalParams p, double ratio);

/// Copy of `p` with uniformly spaced trap centers starting at 0.
PhysicalParams with_spacing(PhysicalParams p, double spacing);

/// Random chain for property checks: spacings 2.4-4 um, nu_t 20-200 kHz,
/// Omega/2pi 1-10 MHz and Delta/2pi in +-20 MHz drawn per atom, Rb mass and
/// the illustrative c_6 of the example configurations.
PhysicalParams random_params(std::mt19937_64& rng, Eigen::Index L);

/// h * 200 GHz um^6 in J m^6, the illustrative van der Waals coefficient.
inline constexpr double kIllustrativeC6 = 6.62607015e-34 * 200e9 * 1e-36;

/// rho'(t) in the eigenbasis for each time; Gamma = 1 when !dephasing.
std::vector<DensityMatrix> channel_trajectory(const ChainSystem& sys, const DensityMatrix& rho0,
                                              const std::vector<double>& times, bool dephasing);

/// Exchange cycles of a two-atom system started in a basis state. Returns
/// are local maxima of <init|rho'|init> found by exchange_cycle_metrics; for
/// each threshold `cycles` counts the returns reached before the trace
/// fidelity tr(rho' rho_fga) first drops below it, and
/// `cycles_return_probability` counts leading returns whose population is
/// at least the threshold. `periods` is crossing_time / period, a
/// continuous version of `cycles`.
struct CycleThresholdCount {
  double threshold = 0.0;
  double crossing_time = std::numeric_limits<double>::infinity();
  double periods = std::numeric_limits<double>::infinity();
  int cycles = 0;
  int cycles_return_probability = 0;
};

struct ExchangeCycleCount {
  double period = 0.0;  // pi / |J|
  std::vector<double> return_times;
  std::vector<double> return_values;
  std::vector<CycleThresholdCount> counts;
};

ExchangeCycleCount count_exchange_cycles(const ChainSystem& sys, Eigen::Index initial,
                                         const std::vector<double>& thresholds, bool dephasing,
                                         int samples_per_period = 40, int max_periods = 400);

/// Exact-oracle options used by the experiments: the given grid, absorbing
/// edges, and a step no longer than the output spacing allows.
ExactOptions experiment_exact_options(Eigen::Index points, double extent, double dt);

/// Trace distance between channel and exact states at the first time the
/// exact trace fidelity tr(rho_exact rho_fga) falls to `threshold`. The
/// search window comes from the channel and doubles until the exact state
/// crosses; throws NumericalError if it never does.
struct InfidelityMetric {
  double time = 0.0;
  double trace_distance = 0.0;
  double log10_trace_distance = 0.0;
};

InfidelityMetric channel_infidelity_metric(const ChainSystem& sys, Eigen::Index initial,
                                           double threshold, const ExactOptions& options);

/// Population of `initial` after one exchange period pi/|J|.
struct ExchangeFidelity {
  double time = 0.0;
  double fga = 0.0;
  double channel = 0.0;
  double exact = std::numeric_limits<double>::quiet_NaN();
};

ExchangeFidelity exchange_fidelity(const ChainSystem& sys, Eigen::Index initial, bool dephasing,
                                   bool exact, const ExactOptions& options);

/// Subcommand drivers. Each writes its CSV files under spec.out_dir and
/// returns their paths in a fixed order.
std::vector<std::filesystem::path> run_two_atom(const ExperimentSpec& spec);
std::vector<std::filesystem::path> run_detuning_sweep(const ExperimentSpec& spec);
std::vector<std::filesystem::path> run_transport(const ExperimentSpec& spec);
std::vector<std::filesystem::path> run_crossover(const ExperimentSpec& spec);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Invariant suite: channel PSD and unit diagonal on random chains,
/// Gram-Schmidt orthogonality, free-mode limits and oracle convergence.
std::vector<CheckResult> run_check(int threads);

}  // namespace rydchan
