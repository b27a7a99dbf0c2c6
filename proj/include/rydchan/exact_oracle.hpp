#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rydchan/channel.hpp"
#include "rydchan/units.hpp"

namespace rydchan {

/// Uniform periodic grid for the relative coordinate x12 = x2 - x1 on
/// [-extent, extent). The kinetic energy of x12 is -d^2/dx^2 in normalized
/// units (reduced mass m/2).
struct RelativeGrid {
  Eigen::Index points = 1024;
  double extent = 40.0;

  double dx() const { return 2.0 * extent / double(points); }
  double k_max() const { return constants::pi / dx(); }
  Eigen::VectorXd x() const;
  Eigen::VectorXd k() const;  // FFT ordering
};

/// Smallest power-of-two grid that keeps a packet pushed by `force` on the
/// grid up to `t_max`, in both position (F t^2 + 10 sqrt(1+t^2)) and
/// momentum (F t + 12), but never smaller than `min_extent`.
RelativeGrid grid_for(double force, double t_max, double min_extent = 20.0);

/// Two-atom state: column s of `psi` is the partial wavefunction of spin
/// state s in {gg, gr, rg, rr}.
struct SpinMotionState {
  Eigen::MatrixXcd psi;            // points x 4
  Eigen::Vector4d absorbed = Eigen::Vector4d::Zero();  // norm removed by the absorber

  double norm(double dx) const;
  /// Reduced spin density matrix, absorbed norm added to the diagonal.
  Eigen::Matrix4cd reduced(double dx) const;
};

/// Gaussian of unit density variance in x12 times the spin vector.
SpinMotionState initial_state(const RelativeGrid& grid, const Eigen::Vector4cd& spin);

/// First moment of x12 in the |rr> branch, normalized by its branch norm.
/// Throws NumericalError when that norm is below 1e-12.
double mean_separation(const SpinMotionState& state, const RelativeGrid& grid);

/// Density standard deviation of the |gg> branch (used for free spreading).
double branch_width(const SpinMotionState& state, const RelativeGrid& grid, int branch);

struct ExactOptions {
  RelativeGrid grid;
  double dt = 0.0;          // 0 picks a step from the parameters
  bool nonlinear = false;   // full c r^-alpha potential on |rr> instead of -F x
  bool absorb = false;      // soft absorber at the grid edges in x and k
  double boundary_tol = 1e-10;
  bool richardson = false;  // repeat at dt/2 and compare
  double richardson_tol = 1e-6;
};

/// Default step: the coupling term F x12 between |rr> and the kinetic
/// energy is the only non-commuting piece, so dt scales as 1/sqrt(F k_max).
double default_step(const NormalizedChain& chain, const RelativeGrid& grid);

/// Strang split-operator propagator: half potential/spin step (exact 4x4
/// exponential per grid point), full kinetic step in momentum space, half
/// potential/spin step.
class SplitOperator {
 public:
  SplitOperator(const NormalizedChain& chain, const RelativeGrid& grid, double dt,
                bool nonlinear, bool absorb);

  void step(SpinMotionState& state) const;
  double dt() const { return dt_; }
  /// <H> of the (unabsorbed) state.
  double energy(const SpinMotionState& state) const;

 private:
  RelativeGrid grid_;
  double dt_;
  bool absorb_;
  std::vector<Eigen::Matrix4cd> half_potential_;
  std::vector<Eigen::Matrix4d> local_h_;
  Eigen::VectorXcd kinetic_phase_;
  Eigen::VectorXd x_mask_;
  Eigen::VectorXd k_mask_;
  Eigen::VectorXd k_;
};

struct ExactResult {
  std::vector<double> times;
  std::vector<Eigen::Matrix4cd> rho;  // reduced spin states
  std::vector<double> norm;           // grid norm (excludes absorbed)
  double step = 0.0;
  double richardson_change = 0.0;     // max |delta rho| against dt/2, if run
};

/// Evolves a two-atom spin density matrix (mixed states are split into
/// eigenvectors) with the motion starting in the trap ground state. `times`
/// must start at 0 and increase. Throws GridError when density reaches the
/// edge of the grid without the absorber and StepError when the Richardson
/// check fails.
ExactResult evolve_exact(const NormalizedChain& chain, const Eigen::Matrix4cd& rho0,
                         const std::vector<double>& times, const ExactOptions& options);

/// Pure-state driver keeping the full state at each output time.
std::vector<SpinMotionState> evolve_exact_states(const NormalizedChain& chain,
                                                 const Eigen::Vector4cd& psi0,
                                                 const std::vector<double>& times,
                                                 const ExactOptions& options);

}  // namespace rydchan
