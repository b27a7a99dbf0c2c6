#pragma once

#include <Eigen/Dense>

namespace rydchan {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;       // J s
inline constexpr double amu = 1.66053906660e-27;      // kg
inline constexpr double pi = 3.14159265358979323846;
}  // namespace constants

/// Chain parameters as they appear in a configuration file (SI units).
struct PhysicalParams {
  double atom_mass = 0.0;                // atomic mass units
  double trap_frequency = 0.0;           // nu_t in Hz (not angular)
  Eigen::VectorXd trap_centers;          // m, strictly increasing
  Eigen::VectorXd rabi;                  // Omega_l in rad/s
  Eigen::VectorXd detuning;              // Delta_l in rad/s
  double interaction_coefficient = 0.0;  // c_alpha in J m^alpha
  int interaction_exponent = 6;          // alpha, 3 or 6

  Eigen::Index size() const { return trap_centers.size(); }
};

/// Chain in normalized units: lengths in sigma_0, energies in hbar*omega_t,
/// times in 1/omega_t (so hbar = m = sigma_0 = 1). Only nearest-neighbour bonds
/// carry an interaction; bond b joins atoms b and b+1.
struct NormalizedChain {
  Eigen::Index L = 0;
  Eigen::VectorXd spacings;  // r^0_{b,b+1}
  Eigen::VectorXd v0;        // static interaction V^(0) per bond
  Eigen::VectorXd force;     // linearized force F per bond, positive if repulsive
  Eigen::VectorXd omega;     // Rabi frequency per atom
  Eigen::VectorXd delta;     // detuning per atom
  int alpha = 6;

  double length_scale = 1.0;  // sigma_0 in m
  double time_scale = 1.0;    // s per normalized time unit
  double energy_scale = 1.0;  // J per normalized energy unit
  double mass = 1.0;          // kg

  double to_seconds(double t) const { return t * time_scale; }
  double from_seconds(double t) const { return t / time_scale; }
  double to_meters(double x) const { return x * length_scale; }
  double from_meters(double x) const { return x / length_scale; }
  /// rad/s -> normalized energy (hbar = 1).
  double from_angular(double w) const { return w * time_scale; }
  double to_angular(double e) const { return e / time_scale; }
};

/// Ground-state width sqrt(hbar / (2 pi nu_t m)) of a harmonic trap, in m.
double trap_width(double trap_frequency_hz, double atom_mass_amu);

/// Inverse of trap_width: the trap frequency (Hz) giving width sigma0 (m).
double trap_frequency_for_width(double sigma0_m, double atom_mass_amu);

/// Power-law interaction c r^-alpha.
double power_law_interaction(double c_alpha, int alpha, double r0);

/// -dV/dr at r0 for V = c r^-alpha: alpha c r0^-(alpha+1).
double linearized_force(double c_alpha, int alpha, double r0);

/// Checks the PhysicalParams invariants; throws ConfigError on violation.
void validate(const PhysicalParams& p);

NormalizedChain normalize(const PhysicalParams& p);

/// Free spreading of a Gaussian whose density has standard deviation `s0`:
/// s(t) = s0 sqrt(1 + (hbar t / (2 m s0^2))^2). Pass hbar_over_mass = 1 for
/// normalized units.
double free_spread(double s0, double hbar_over_mass, double t);

}  // namespace rydchan
