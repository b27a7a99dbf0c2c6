#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

#include "rydchan/channel.hpp"
#include "rydchan/spin_model.hpp"

namespace rydchan {

enum class Basis { computational, eigen };

/// Density matrix tagged with the basis it is written in.
struct DensityMatrix {
  Eigen::MatrixXcd matrix;
  Basis basis = Basis::computational;

  Eigen::Index dim() const { return matrix.rows(); }
};

DensityMatrix pure_state(const Eigen::VectorXcd& psi, Basis basis = Basis::computational);

/// Throws NumericalError unless rho is Hermitian and unit-trace to `tol` and
/// its smallest eigenvalue exceeds -psd_tol.
void check_density(const DensityMatrix& rho, double tol = 1e-10, double psd_tol = 1e-8);

DensityMatrix to_eigen(const DensityMatrix& rho, const Eigen::MatrixXd& vectors);
DensityMatrix to_computational(const DensityMatrix& rho, const Eigen::MatrixXd& vectors);

/// rho_nm(t) = exp(-i (E_n - E_m) t) rho_nm(0), returned in the eigenbasis.
/// A computational-basis input is rotated first.
DensityMatrix evolve_fga(const DensityMatrix& rho0, const EigenSystem<double>& es, double t);

/// rho'_nm = Gamma_mn rho_nm with Gamma_nm = <psi_n|psi_m>. Both live in the
/// eigenbasis.
DensityMatrix apply_channel(const DensityMatrix& rho_fga, const Eigen::MatrixXcd& gamma);

/// Re tr(rho_a rho_b).
double trace_fidelity(const DensityMatrix& a, const DensityMatrix& b);

/// Half the trace norm of a - b.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

/// Two-atom eigenstate nearest to |rr> and the breakdown time of every other
/// branch, from x(T) F |<n|pi pi|rr'>| = |E_rr' - E_n| with x(T) = F T^2 / 2m.
struct BreakdownBranch {
  Eigen::Index state = 0;
  double gap = 0.0;      // |E_rr' - E_n|
  double element = 0.0;  // |<n| pi^1 pi^2 |rr'>|
  double time = std::numeric_limits<double>::infinity();
};

struct BreakdownEstimate {
  Eigen::Index rr_state = 0;
  std::vector<BreakdownBranch> branches;
  double t_star = std::numeric_limits<double>::infinity();
};

BreakdownEstimate breakdown_time(const EigenSystem<double>& es, const NormalizedChain& chain);

/// Van der Waals closed form r0/(3 V0) sqrt(m/2 |gap/element|).
double breakdown_time_vdw(double r0, double v0, double mass, double gap, double element);

/// Root of F^2 T^2 |element| / 2m = gap found by bracketing and bisection.
double breakdown_time_root(double force, double mass, double gap, double element);

/// Far-detuned exchange rate J = Omega^2 V / (4 Delta (Delta - V)).
double spin_exchange_rate(double omega, double delta, double v0);

/// dJ/dV = Omega^2 / (4 (Delta - V)^2).
double spin_exchange_rate_dv(double omega, double delta, double v0);

/// Returns of a population series to its initial value.
struct ExchangeCycles {
  std::vector<double> peak_times;
  std::vector<double> peak_values;
  int cycles = 0;  // leading returns with value >= threshold
};

/// Local maxima of `values` sampled at `times` (t = 0 excluded), refined by a
/// parabola through the three samples. Maxima below `min_value` are not
/// returns (ripple near the population minimum), and maxima closer than
/// `min_separation` to a higher one are discarded, which suppresses fast
/// light-shift ripple on top of a return.
ExchangeCycles exchange_cycle_metrics(const std::vector<double>& times,
                                      const std::vector<double>& values, double threshold,
                                      double min_separation, double min_value = 0.5);

/// Two-atom labels used for spectral branches.
enum class BranchLabel { gg, s, rr, a };

std::string to_string(BranchLabel label);

/// Labels each eigenstate by its largest squared overlap with |gg>, |s>,
/// |rr>, |a> (lowest index on ties).
std::vector<BranchLabel> branch_labels(const EigenSystem<double>& es);

}  // namespace rydchan
