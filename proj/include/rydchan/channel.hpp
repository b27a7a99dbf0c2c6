#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "rydchan/coupling.hpp"

namespace rydchan {

using cdouble = std::complex<double>;

/// Exact propagation of one decoupled mode,
///   i d_t psi = -psi''/2 - F s psi + omega^2 s^2 psi / 2,  psi(s,0) = pi^-1/4 e^{-s^2/2},
/// in the Gaussian form psi = pi^-1/4 e^alpha / sqrt(gamma) e^{-kbar s^2/2 + bbar s}.
/// `log_gamma` carries the branch of log(gamma) that is continuous in t from
/// log(1) = 0, which fixes the sign of sqrt(gamma).
struct ModeCoefficients {
  cdouble kbar;
  cdouble bbar;
  cdouble alpha;
  cdouble gamma;
  cdouble log_gamma;
  double log_re_kbar = 0.0;  // log Re kbar = -log |gamma|^2, finite where Re kbar underflows
  // Classical trajectory from rest, s'' = F - omega^2 s, and the phase theta
  // of the centred form (action F^2 W / 2 minus arg(gamma) / 2).
  double center = 0.0;
  double momentum = 0.0;
  double phase = 0.0;
};

/// Closed-form coefficients. The expressions are entire in omega^2, so any
/// real omega_sq is allowed: negative values describe an inverted oscillator
/// (sin/cos continue to sinh/cosh). Small |omega^2| t^2 is evaluated by power
/// series, which removes the omega -> 0 singularity.
ModeCoefficients mode_coefficients(double omega_sq, double force, double t);

/// Same, for a complex frequency whose square must be real.
ModeCoefficients mode_coefficients(cdouble omega, double force, double t);

/// The omega -> 0 limits: kbar = 1/(1+it), bbar = F(2i-t)t/(2(1+it)),
/// alpha = F^2 (t-4i) t^3 / (24(1+it)), gamma = 1+it.
ModeCoefficients free_mode_limit(double force, double t);

/// Gaussian data of one partial wavefunction in Gram-Schmidt coordinates:
///   psi_n(g,t) = pi^{-(L-1)/4} C_n exp(-g^T K_n g / 2 + b_n^T g).
/// The same state in centred form is
///   N_n exp(-(g-xbar)^T K_n (g-xbar) / 2 + i pbar^T (g-xbar) + i theta)
/// with N_n^4 = det Re K_n / pi^{L-1}. The centred data come from the
/// classical trajectory of each mode, and log det Re K_n is summed per mode,
/// so neither is limited by the conditioning of Re K_n.
struct StateFactors {
  cdouble log_c;       // log C_n on the continuous branch
  Eigen::MatrixXcd K;  // complex symmetric, Re(K) positive definite
  Eigen::VectorXcd b;

  Eigen::VectorXd center;    // xbar, equal to Re(K)^-1 Re(b)
  Eigen::VectorXd momentum;  // pbar, equal to Im(b) - Im(K) xbar
  double phase = 0.0;        // theta
  double log_det_re = 0.0;   // log det Re(K)

  cdouble C() const { return std::exp(log_c); }
};

StateFactors assemble_state_factors(const ModeSet& modes, double t);

/// <psi_n|psi_n> from C_n, K_n and b_n directly, with the 2^{(L-1)/2}
/// prefactor of the overlap formula. Equal to 1 analytically; the deviation
/// measures the cancellation error of the raw coefficients.
double raw_norm(const StateFactors& f);

/// Gamma_nm = <psi_n|psi_m>. With A = K_n^* + K_m, delta = xbar_m - xbar_n
/// and beta = i (pbar_m - pbar_n) - K_n^* delta,
///   log Gamma_nm = (L-1)/2 log 2 + (log det Re K_n + log det Re K_m)/4
///                  - log det A / 2 + beta^T A^-1 beta / 2
///                  - delta^T K_n^* delta / 2 - i pbar_n^T delta
///                  + i (theta_m - theta_n),
/// or equivalently with conj(log C_n) + log C_m + s^T A^-1 s / 2,
/// s = conj(b_n) + b_m, in place of the centred terms; whichever has the
/// smaller terms is used. Pairs whose bound
/// 2^{(L-1)/2} exp(-|log det Re K_n - log det Re K_m| / 4) is below 1e-100
/// return 0. log det A follows the unpivoted LDL^T pivots, each of which has
/// positive real part, so the branch is continuous in t without tracking.
cdouble gamma_overlap(const StateFactors& n, const StateFactors& m);

struct ChannelMatrix {
  double t = 0.0;
  Eigen::MatrixXcd gamma;
  std::vector<StateFactors> factors;
};

/// Full Gamma(t). Per-state factors cost O(dim L^3), the pair loop
/// O(dim^2 L^3); rows are split across `threads` workers. The diagonal is
/// set to 1, which the pair formula reduces to in a state's own mode basis.
ChannelMatrix build_channel(const DisentangledModes& modes, double t, int threads = 1);

/// True when all modes share one frequency and feel no force, so K is a
/// multiple of the identity and b = 0 at every t.
bool isotropic(const ModeSet& state);

/// Column m of Gamma(t): Gamma_nm for all n. An isotropic state m takes an
/// O(dim L) path; otherwise every overlap costs a full LDL^T.
Eigen::VectorXcd channel_column(const DisentangledModes& modes, Eigen::Index m, double t);

/// The general path of channel_column, kept separate for cross-checks.
Eigen::VectorXcd channel_column_general(const DisentangledModes& modes, Eigen::Index m, double t);

}  // namespace rydchan
