#include "rydchan/channel.hpp"

#include <array>
#include <cmath>

#include "rydchan/errors.hpp"
#include "rydchan/parallel.hpp"

namespace rydchan {

namespace {

constexpr cdouble I{0.0, 1.0};
constexpr int kSeriesTerms = 24;
constexpr double kTwoPi = 2.0 * constants::pi;

const std::array<double, 2 * kSeriesTerms + 8>& inverse_factorials() {
  static const auto table = [] {
    std::array<double, 2 * kSeriesTerms + 8> f{};
    f[0] = 1.0;
    for (std::size_t k = 1; k < f.size(); ++k) f[k] = f[k - 1] / double(k);
    return f;
  }();
  return table;
}

// The five entire functions of x = omega^2 the coefficients are built from,
// with S = sin(wt)/w, C = (1-cos wt)/w^2, P = (t cos wt - S)/w^2,
// R = (t S - 2C)/w^2. Everything is divided by `scale` (cosh for the
// inverted oscillator at large kappa t) and log(scale) is reported separately.
// W = (t - S cos wt)/w^2 is not scaled; F^2 W / 2 is the classical action.
struct EntireParts {
  double cos_part;
  double S;
  double C;
  double P;
  double R;
  double W = 0.0;
  double log_scale = 0.0;
  double phase_turns = 0.0;  // 2 pi multiples to add to arg(gamma)
};

EntireParts entire_parts(double x, double t) {
  const double y = -x * t * t;
  EntireParts e{};
  if (std::abs(y) <= 1.0) {
    const auto& f = inverse_factorials();
    double c0 = 0, s1 = 0, c2 = 0, p = 0, r = 0, w = 0, yk = 1.0, four = 4.0;
    for (int k = 0; k < kSeriesTerms; ++k) {
      c0 += yk * f[2 * k];
      s1 += yk * f[2 * k + 1];
      c2 += yk * f[2 * k + 2];
      p += yk * (f[2 * k + 2] - f[2 * k + 3]);
      r += yk * (f[2 * k + 3] - 2.0 * f[2 * k + 4]);
      w += yk * four * f[2 * k + 3];
      yk *= y;
      four *= 4.0;
    }
    e.cos_part = c0;
    e.S = t * s1;
    e.C = t * t * c2;
    e.P = -t * t * t * p;
    e.R = -t * t * t * t * r;
    e.W = t * t * t * w;
    return e;
  }
  if (x > 0.0) {
    const double w = std::sqrt(x);
    const double theta = w * t;
    const double co = std::cos(theta);
    const double si = std::sin(theta);
    e.cos_part = co;
    e.S = si / w;
    e.C = (1.0 - co) / x;
    e.P = (t * co - e.S) / x;
    e.R = (t * e.S - 2.0 * e.C) / x;
    e.W = (t - e.S * co) / x;
    const double wrapped = std::atan2(si, co);
    e.phase_turns = std::round((theta - wrapped) / kTwoPi);
    return e;
  }
  // Inverted oscillator, everything divided by cosh(kappa t).
  const double kappa = std::sqrt(-x);
  const double u = kappa * t;
  const double th = std::tanh(u);
  const double sech = 1.0 / std::cosh(u);
  e.cos_part = 1.0;
  e.S = th / kappa;
  e.C = (sech - 1.0) / x;
  e.P = (t - e.S) / x;
  e.R = (t * e.S - 2.0 * e.C) / x;
  e.W = (std::sinh(2.0 * u) / (2.0 * kappa) - t) / kappa / kappa;
  e.log_scale = u + std::log1p(std::exp(-2.0 * u)) - std::log(2.0);
  return e;
}

}  // namespace

ModeCoefficients mode_coefficients(double omega_sq, double force, double t) {
  if (t < 0.0) throw DomainError("mode coefficients need t >= 0");
  const EntireParts e = entire_parts(omega_sq, t);
  const cdouble g_scaled{e.cos_part, e.S};
  ModeCoefficients c;
  // Re kbar = 1/|gamma|^2 exactly; forming it from c^2 + x S^2 cancels
  // catastrophically for the inverted oscillator.
  const double g2 = std::norm(g_scaled);
  c.log_re_kbar = -2.0 * e.log_scale - std::log(g2);
  c.kbar = cdouble(std::exp(c.log_re_kbar), (omega_sq - 1.0) * e.cos_part * e.S / g2);
  c.bbar = I * force * cdouble(e.S, e.C) / g_scaled;
  c.alpha = 0.5 * I * force * force * cdouble(e.P, e.R) / g_scaled;
  c.log_gamma = std::log(g_scaled) + cdouble(e.log_scale, kTwoPi * e.phase_turns);
  c.gamma = std::exp(c.log_gamma);
  // Classical trajectory from rest at the origin; no division by Re kbar.
  const double scale = std::exp(e.log_scale);
  c.center = force * e.C * scale;
  c.momentum = force * e.S * scale;
  c.phase = 0.5 * force * force * e.W - 0.5 * c.log_gamma.imag();
  if (!std::isfinite(c.log_re_kbar) || !std::isfinite(c.center))
    throw NumericalError("mode propagation overflowed (kappa t too large)");
  return c;
}

ModeCoefficients mode_coefficients(cdouble omega, double force, double t) {
  const cdouble x = omega * omega;
  if (std::abs(x.imag()) > 1e-12 * std::max(1.0, std::abs(x)))
    throw DomainError("mode frequency must be real or purely imaginary");
  return mode_coefficients(x.real(), force, t);
}

ModeCoefficients free_mode_limit(double force, double t) {
  const cdouble g{1.0, t};
  ModeCoefficients c;
  c.kbar = 1.0 / g;
  c.bbar = force * (2.0 * I - t) * t / (2.0 * g);
  c.alpha = force * force * (t - 4.0 * I) * t * t * t / (24.0 * g);
  c.gamma = g;
  c.log_gamma = std::log(g);
  c.log_re_kbar = -std::log1p(t * t);
  c.center = 0.5 * force * t * t;
  c.momentum = force * t;
  c.phase = force * force * t * t * t / 3.0 - 0.5 * std::atan(t);
  return c;
}

StateFactors assemble_state_factors(const ModeSet& modes, double t) {
  const Eigen::Index n = modes.d.size();
  StateFactors f;
  f.log_c = 0.0;
  Eigen::VectorXcd kbar(n), bbar(n);
  Eigen::VectorXd center(n), momentum(n);
  for (Eigen::Index l = 0; l < n; ++l) {
    const auto c = mode_coefficients(modes.omega_sq[l], modes.force[l], t);
    f.log_c += c.alpha - 0.5 * c.log_gamma;
    kbar[l] = c.kbar;
    bbar[l] = c.bbar;
    center[l] = c.center;
    momentum[l] = c.momentum;
    f.phase += c.phase;
    f.log_det_re += c.log_re_kbar;
  }
  const Eigen::MatrixXcd Q = modes.Q.cast<cdouble>();
  f.K = Q.transpose() * kbar.asDiagonal() * Q;
  f.K = 0.5 * (f.K + f.K.transpose()).eval();
  f.b = Q.transpose() * bbar;
  f.center = modes.Q.transpose() * center;
  f.momentum = modes.Q.transpose() * momentum;
  return f;
}

double raw_norm(const StateFactors& f) {
  if (f.K.rows() == 0) return std::exp(2.0 * f.log_c.real());
  return std::exp(2.0 * f.log_c.real() + f.b.real().dot(f.center) - 0.5 * f.log_det_re);
}

namespace {

// Unpivoted LDL^T of the complex symmetric A, in place: the strict lower
// triangle holds L, the diagonal D. Returns sum log(d_j); every pivot has
// positive real part, so the branch needs no tracking.
cdouble ldlt_factor(Eigen::MatrixXcd& A) {
  const Eigen::Index n = A.rows();
  cdouble logdet = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const cdouble d = A(j, j);
    if (!(d.real() > 0.0)) throw NumericalError("overlap matrix lost positive real part");
    const cdouble inv = 1.0 / d;
    // Rows from the bottom so A(k, j), k < i, still holds d * l_kj when used.
    for (Eigen::Index i = n - 1; i > j; --i) {
      const cdouble lij = A(i, j) * inv;
      for (Eigen::Index k = j + 1; k <= i; ++k) A(i, k) -= lij * A(k, j);
      A(i, j) = lij;
    }
    logdet += std::log(d);
  }
  if (logdet.real() < std::log(1e-300)) throw NumericalError("det K_nm underflow");
  return logdet;
}

// v^T A^-1 v from the factors (v overwritten by L^-1 v).
cdouble ldlt_quadratic(const Eigen::MatrixXcd& A, Eigen::VectorXcd& v) {
  cdouble quad = 0.0;
  for (Eigen::Index j = 0; j < A.rows(); ++j) {
    const cdouble z = v[j];
    for (Eigen::Index i = j + 1; i < A.rows(); ++i) v[i] -= A(i, j) * z;
    quad += z * z / A(j, j);
  }
  return quad;
}

// Rigorous bound: |Gamma_nm| <= sup|psi_m| * integral |psi_n|
//   = 2^{d/2} (det Re K_m / det Re K_n)^{1/4}, and the same with n <-> m.
// Below this the pair is stored as an exact zero.
constexpr double kLogNegligible = -230.0;  // ~1e-100

cdouble overlap(const StateFactors& n, const StateFactors& m, Eigen::MatrixXcd& A,
                Eigen::VectorXcd& v) {
  const Eigen::Index modes = m.K.rows();
  const double log_pref = 0.5 * double(modes) * std::log(2.0);
  if (log_pref - 0.25 * std::abs(n.log_det_re - m.log_det_re) < kLogNegligible) return 0.0;

  A = n.K.conjugate() + m.K;
  const cdouble logdet = ldlt_factor(A);

  // Two equivalent forms. Referenced at the origin:
  //   conj(log C_n) + log C_m + s^T A^-1 s / 2,  s = conj(b_n) + b_m,
  // which loses digits when a packet sits many widths away from the origin.
  // Centred on xbar_n, with delta = xbar_m - xbar_n, dp = pbar_m - pbar_n,
  //   (log det Re K_n + log det Re K_m)/4 + beta^T A^-1 beta / 2
  //   - delta^T K_n^* delta / 2 - i pbar_n^T delta + i (theta_m - theta_n),
  // beta = i dp - K_n^* delta, which loses digits for wide chirped packets
  // whose centre and momentum are huge but nearly cancel. The rounding error
  // of |Gamma| scales with the largest real part, so the smaller one wins.
  // Imaginary parts only move the phase, which neither form fixes better
  // than eps * |theta|.
  v = n.b.conjugate() + m.b;
  const cdouble origin_quad = 0.5 * ldlt_quadratic(A, v);
  const cdouble origin = std::conj(n.log_c) + m.log_c + origin_quad;
  const double origin_size = std::max(
      {std::abs(n.log_c.real()), std::abs(m.log_c.real()), std::abs(origin_quad.real())});

  const Eigen::VectorXd delta = m.center - n.center;
  const Eigen::VectorXcd kn_delta = n.K.conjugate() * delta.cast<cdouble>();
  v = I * (m.momentum - n.momentum).cast<cdouble>() - kn_delta;
  const cdouble centred_quad = 0.5 * ldlt_quadratic(A, v);
  const cdouble spring = 0.5 * (delta.cast<cdouble>().array() * kn_delta.array()).sum();
  const double drift = n.momentum.dot(delta);
  const cdouble centred = 0.25 * (n.log_det_re + m.log_det_re) + centred_quad - spring -
                          I * drift + I * (m.phase - n.phase);
  const double centred_size = std::max(std::abs(centred_quad.real()), std::abs(spring.real()));

  const bool use_origin = std::isfinite(origin_size) &&
                          !(std::isfinite(centred_size) && centred_size <= origin_size);
  return std::exp(log_pref - 0.5 * logdet + (use_origin ? origin : centred));
}

}  // namespace

cdouble gamma_overlap(const StateFactors& n, const StateFactors& m) {
  if (n.K.rows() != m.K.rows()) throw UsageError("state factors of different mode counts");
  if (n.K.rows() == 0) return std::exp(std::conj(n.log_c) + m.log_c);
  Eigen::MatrixXcd K;
  Eigen::VectorXcd b;
  return overlap(n, m, K, b);
}

ChannelMatrix build_channel(const DisentangledModes& modes, double t, int threads) {
  const Eigen::Index dim = Eigen::Index(modes.states.size());
  ChannelMatrix ch;
  ch.t = t;
  ch.factors.resize(dim);
  for (Eigen::Index n = 0; n < dim; ++n) ch.factors[n] = assemble_state_factors(modes.states[n], t);
  ch.gamma.resize(dim, dim);
  // In a state's own mode basis the pair formula for n = m collapses to 1.
  ch.gamma.diagonal().setOnes();

  // Row n costs dim - n overlaps; rows are handed out in order.
  parallel_for(std::size_t(dim), threads, [&](std::size_t row) {
    const Eigen::Index n = Eigen::Index(row);
    Eigen::MatrixXcd K;
    Eigen::VectorXcd b;
    for (Eigen::Index m = n + 1; m < dim; ++m) {
      const cdouble g = modes.modes() == 0
                            ? std::exp(std::conj(ch.factors[n].log_c) + ch.factors[m].log_c)
                            : overlap(ch.factors[n], ch.factors[m], K, b);
      ch.gamma(n, m) = g;
      ch.gamma(m, n) = std::conj(g);
    }
  });
  return ch;
}

bool isotropic(const ModeSet& s) {
  if (s.d.size() == 0) return true;
  return (s.omega_sq.array() == s.omega_sq[0]).all() && (s.force.array() == 0.0).all();
}

namespace {

// Gamma_nm when state m has K_m = k I and b_m = 0: K_nm is diagonal in the
// mode basis of n, so the solve reduces to a sum over modes.
Eigen::VectorXcd isotropic_column(const DisentangledModes& modes, Eigen::Index m, double t) {
  const Eigen::Index dim = Eigen::Index(modes.states.size());
  const Eigen::Index count = modes.modes();
  const ModeCoefficients ref = mode_coefficients(count ? modes.states[m].omega_sq[0] : 0.0, 0.0, t);
  const cdouble log_cm = double(count) * (ref.alpha - 0.5 * ref.log_gamma);
  Eigen::VectorXcd col(dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    const ModeSet& s = modes.states[n];
    cdouble log_g = 0.5 * double(count) * std::log(2.0) + log_cm;
    for (Eigen::Index l = 0; l < count; ++l) {
      const auto c = mode_coefficients(s.omega_sq[l], s.force[l], t);
      const cdouble k = std::conj(c.kbar) + ref.kbar;
      const cdouble b = std::conj(c.bbar);
      log_g += std::conj(c.alpha - 0.5 * c.log_gamma) + 0.5 * b * b / k - 0.5 * std::log(k);
    }
    col[n] = std::exp(log_g);
  }
  return col;
}

}  // namespace

Eigen::VectorXcd channel_column(const DisentangledModes& modes, Eigen::Index m, double t) {
  if (isotropic(modes.states[m])) return isotropic_column(modes, m, t);
  return channel_column_general(modes, m, t);
}

Eigen::VectorXcd channel_column_general(const DisentangledModes& modes, Eigen::Index m, double t) {
  const Eigen::Index dim = Eigen::Index(modes.states.size());
  const StateFactors fm = assemble_state_factors(modes.states[m], t);
  Eigen::VectorXcd col(dim);
  Eigen::MatrixXcd K;
  Eigen::VectorXcd b;
  for (Eigen::Index n = 0; n < dim; ++n) {
    const StateFactors fn = n == m ? fm : assemble_state_factors(modes.states[n], t);
    col[n] = n == m                ? cdouble(1.0)
             : modes.modes() == 0 ? std::exp(std::conj(fn.log_c) + fm.log_c)
                                  : overlap(fn, fm, K, b);
  }
  return col;
}

}  // namespace rydchan
