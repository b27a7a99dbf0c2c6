#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rydchan/channel.hpp"
#include "rydchan/coupling.hpp"
#include "rydchan/spin_model.hpp"

namespace rydchan {

/// Largest chain of the single-excitation transport model.
inline constexpr Eigen::Index kMaxTransportLength = 1000;

/// Effective XX chain of atoms 1..L plus an auxiliary spin 0 that holds the
/// other half of the Bell pair and is not coupled to the chain. All values
/// are normalized; bond b joins chain atoms b+1 and b+2.
struct EffectiveChain {
  Eigen::VectorXd mu;        // on-site energies, one per chain atom
  Eigen::VectorXd J;         // exchange per bond
  Eigen::VectorXd dJ;        // dJ/dr per bond
  Eigen::VectorXd spacings;  // rest length per bond
  double aux_energy = 0.0;

  Eigen::Index L() const { return mu.size(); }
};

/// Takes (mu, J, J') verbatim. Throws UsageError on inconsistent sizes.
EffectiveChain effective_chain_direct(const Eigen::VectorXd& mu, const Eigen::VectorXd& J,
                                      const Eigen::VectorXd& dJ, const Eigen::VectorXd& spacings);

/// J_b = Omega_b^2 V_b / (4 Delta (Delta - V_b)) and J'_b = dJ/dV (-alpha V_b / r_b).
/// Throws DomainError at a pole.
EffectiveChain effective_chain_physical(const Eigen::VectorXd& omega_per_bond, double delta,
                                        const Eigen::VectorXd& v0, const Eigen::VectorXd& spacings,
                                        int alpha);

/// Perfect-transfer profile sqrt(l (L - l)), l = 1..L-1, scaled so that its
/// largest entry equals j_max.
Eigen::VectorXd pst_profile(Eigen::Index L, double j_max);

/// Time pi / (2c) at which a PST chain with J_l = c sqrt(l (L-l)) moves an
/// excitation from atom 1 to atom L.
double pst_transfer_time(const EffectiveChain& chain);

/// Physical inputs of the transport experiment.
struct TransportPhysics {
  double atom_mass = 86.909;         // amu
  double spacing = 3.2e-6;           // m
  double interaction_coefficient = 0.0;
  int alpha = 6;
  double delta_over_v = -1.0 / 3.0;
  double omega_over_delta = 0.1;     // largest bond Rabi frequency over |Delta|
};

/// Uniform chain in PST configuration at trap frequency nu_t: per-bond Rabi
/// frequencies are scaled so that J_b follows pst_profile.
EffectiveChain pst_chain(const TransportPhysics& physics, double trap_frequency, Eigen::Index L);

/// Effective single-excitation problem in the basis {|r_0, vac>, |g_0, e_j>}.
struct TransportSystem {
  Eigen::Index L = 0;
  Eigen::MatrixXd hamiltonian;  // (L+1) x (L+1)
  EigenSystem<double> es;
  std::vector<BondOperator> bonds;
  Eigen::VectorXd strengths;
  CouplingData coupling;
  DisentangledModes modes;
  Eigen::Index aux_state = 0;   // eigenstate index of |r_0, vac>
};

TransportSystem build_transport_system(const EffectiveChain& chain);

/// Wootters concurrence of a two-qubit density matrix. Throws NumericalError
/// if rho is not Hermitian, not unit trace, or has an eigenvalue below -1e-8.
double concurrence(const Eigen::Matrix4cd& rho);

/// Reduced state of (aux, atom L) in the basis {gg, gr, rg, rr} with the
/// auxiliary spin as the first qubit, from a site-basis (L+1)-dim state.
Eigen::Matrix4cd reduce_aux_end(const Eigen::MatrixXcd& rho_sites);

/// Concurrence C_0L at each time. With `full` the whole channel is built and
/// the state reduced before the Wootters formula; otherwise only the Gamma
/// column of the auxiliary state is used (rho_0L is an X state with empty
/// |rr>, so C = 2 |rho_{gr,rg}|).
std::vector<double> transport_concurrence(const TransportSystem& sys,
                                          const std::vector<double>& times, bool dephasing,
                                          bool full = false);

struct TransportPeak {
  double concurrence = 0.0;
  double time = 0.0;
};

/// Maximum of C_0L(t) for t in (0, 1.5 t_pi], sampled then refined by
/// golden-section search.
TransportPeak peak_concurrence(const TransportSystem& sys, double t_pi, bool dephasing);

struct CrossoverPoint {
  double trap_frequency = 0.0;
  double sigma0 = 0.0;              // m
  Eigen::Index L_max = 0;           // 0 when no L reaches 1/2
  double L_interpolated = 0.0;
  std::vector<TransportPeak> peaks; // one per L in the grid
};

/// For every trap frequency, the largest L of `lengths` whose peak
/// concurrence reaches 1/2.
std::vector<CrossoverPoint> crossover_scan(const TransportPhysics& physics,
                                           const std::vector<double>& trap_frequencies,
                                           const std::vector<Eigen::Index>& lengths,
                                           bool dephasing, int threads = 1);

/// Least-squares y = a x^2 + b x + c.
struct QuadraticFit {
  double a = 0.0, b = 0.0, c = 0.0;
  double vertex = 0.0;    // -b / 2a
  bool interior = false;  // a < 0 and the vertex lies strictly inside the data range
};

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace rydchan
