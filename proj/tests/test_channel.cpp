#include <doctest.h>

#include <random>
#include <tuple>

#include "rydchan/channel.hpp"

using namespace rydchan;

namespace {

struct Gaussian {
  cdouble k, b, c;
};

// RK4 for psi = exp(-k s^2/2 + b s + c) under
// i psi_t = -psi''/2 - F s psi + omega^2 s^2 psi / 2.
Gaussian integrate_mode(double omega_sq, double force, double t, int steps = 40000) {
  const cdouble I(0, 1);
  const auto rhs = [&](const Gaussian& g) {
    return Gaussian{I * (omega_sq - g.k * g.k), I * (force - g.k * g.b),
                    0.5 * I * (g.b * g.b - g.k)};
  };
  const auto axpy = [](const Gaussian& g, double h, const Gaussian& d) {
    return Gaussian{g.k + h * d.k, g.b + h * d.b, g.c + h * d.c};
  };
  Gaussian g{1.0, 0.0, -0.25 * std::log(constants::pi)};
  const double h = t / steps;
  for (int i = 0; i < steps; ++i) {
    const Gaussian k1 = rhs(g), k2 = rhs(axpy(g, h / 2, k1)), k3 = rhs(axpy(g, h / 2, k2)),
                   k4 = rhs(axpy(g, h, k3));
    g.k += h / 6 * (k1.k + 2.0 * k2.k + 2.0 * k3.k + k4.k);
    g.b += h / 6 * (k1.b + 2.0 * k2.b + 2.0 * k3.b + k4.b);
    g.c += h / 6 * (k1.c + 2.0 * k2.c + 2.0 * k3.c + k4.c);
  }
  return g;
}

Eigen::MatrixXd rotation(Eigen::Index n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd a(n, n);
  for (auto& v : a.reshaped()) v = normal(rng);
  return Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
}

ModeSet mode_set(const Eigen::MatrixXd& Q, Eigen::VectorXd omega_sq, Eigen::VectorXd force) {
  ModeSet s;
  s.Q = Q;
  s.d = 0.5 * omega_sq;
  s.omega_sq = std::move(omega_sq);
  s.force = std::move(force);
  return s;
}

// psi_n(g) on a tensor grid from the raw Gaussian coefficients.
cdouble psi_at(const StateFactors& f, const Eigen::VectorXd& g) {
  const double d = double(g.size());
  const Eigen::VectorXcd gc = g.cast<cdouble>();
  return std::pow(constants::pi, -0.25 * d) *
         std::exp(f.log_c - 0.5 * (gc.transpose() * f.K * gc).value() + (f.b.transpose() * gc).value());
}

}  // namespace

TEST_CASE("mode coefficients solve the single-mode Schroedinger equation") {
  struct Case {
    double omega_sq, force, t;
  };
  for (const Case c : {Case{1.0, 0.0, 2.0}, Case{2.5, 3.0, 2.7}, Case{0.01, 5.0, 1.5},
                       Case{-0.3, 2.0, 4.0}, Case{-0.05, 1.0, 3.0}, Case{30.0, 10.0, 2.0},
                       Case{-4.0, 0.5, 3.0}}) {
    CAPTURE(c.omega_sq);
    CAPTURE(c.t);
    const ModeCoefficients m = mode_coefficients(c.omega_sq, c.force, c.t);
    const Gaussian g = integrate_mode(c.omega_sq, c.force, c.t);
    CHECK(std::abs(m.kbar - g.k) < 1e-8 * std::max(1.0, std::abs(g.k)));
    CHECK(std::abs(m.bbar - g.b) < 1e-8 * std::max(1.0, std::abs(g.b)));
    const cdouble c_lib = -0.25 * std::log(constants::pi) + m.alpha - 0.5 * m.log_gamma;
    CHECK(std::abs(c_lib - g.c) < 1e-7 * std::max(1.0, std::abs(g.c)));
    CHECK(std::abs(std::exp(m.log_gamma) - m.gamma) < 1e-9 * std::abs(m.gamma));
  }
}

TEST_CASE("free-mode limit") {
  for (double f : {0.0, 0.8, 6.0}) {
    const ModeCoefficients a = mode_coefficients(1e-12, f, 1.0);
    const ModeCoefficients b = free_mode_limit(f, 1.0);
    const auto close = [](cdouble x, cdouble y) {
      return std::abs(x - y) <= 1e-10 * std::max(1.0, std::abs(y));
    };
    CHECK(close(a.kbar, b.kbar));
    CHECK(close(a.bbar, b.bbar));
    CHECK(close(a.alpha, b.alpha));
    CHECK(close(a.gamma, b.gamma));
    // And the limit itself against direct integration at omega = 0.
    const Gaussian g = integrate_mode(0.0, f, 1.0);
    CHECK(std::abs(b.kbar - g.k) < 1e-9);
    CHECK(std::abs(b.bbar - g.b) < 1e-9 * std::max(1.0, std::abs(g.b)));
  }
  CHECK(mode_coefficients(cdouble(0.0, 0.5), 1.0, 2.0).kbar ==
        mode_coefficients(-0.25, 1.0, 2.0).kbar);
  CHECK_THROWS_AS(mode_coefficients(cdouble(1.0, 1.0), 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(mode_coefficients(1.0, 1.0, -0.1), DomainError);
}

TEST_CASE("free modes give Gamma identically one") {
  for (Eigen::Index L = 2; L <= 10; ++L) {
    DisentangledModes dm;
    dm.atoms = L;
    dm.G = gram_schmidt_closed_form(L);
    for (int n = 0; n < 3; ++n)
      dm.states.push_back(mode_set(rotation(L - 1, unsigned(L * 10 + n)),
                                   Eigen::VectorXd::Zero(L - 1), Eigen::VectorXd::Zero(L - 1)));
    for (double t : {0.0, 0.3, 2.0}) {
      const ChannelMatrix ch = build_channel(dm, t);
      CHECK((ch.gamma.array() - 1.0).abs().maxCoeff() < 1e-10);
      for (const auto& f : ch.factors) CHECK(raw_norm(f) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("two-mode overlap against quadrature") {
  DisentangledModes dm;
  dm.atoms = 3;
  dm.G = gram_schmidt_closed_form(3);
  dm.states = {mode_set(rotation(2, 1), Eigen::Vector2d(0.9, -0.2), Eigen::Vector2d(1.2, -0.4)),
               mode_set(rotation(2, 2), Eigen::Vector2d(0.05, 1.7), Eigen::Vector2d(-0.6, 0.9)),
               mode_set(rotation(2, 3), Eigen::Vector2d(-0.4, 0.3), Eigen::Vector2d(0.0, 2.0))};
  const double t = 0.8;
  const ChannelMatrix ch = build_channel(dm, t);
  const int n = 321;
  const double a = 10.0, h = 2.0 * a / (n - 1);
  Eigen::MatrixXcd quad = Eigen::MatrixXcd::Zero(3, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Eigen::Vector2d g(-a + i * h, -a + j * h);
      Eigen::Vector3cd psi;
      for (int s = 0; s < 3; ++s) psi[s] = psi_at(ch.factors[s], g);
      quad += psi.conjugate() * psi.transpose() * (h * h);
    }
  CHECK((quad - ch.gamma).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("three-mode overlap against quadrature") {
  DisentangledModes dm;
  dm.atoms = 4;
  dm.G = gram_schmidt_closed_form(4);
  dm.states = {
      mode_set(rotation(3, 4), Eigen::Vector3d(0.8, -0.2, 0.05), Eigen::Vector3d(1.5, -0.7, 0.3)),
      mode_set(rotation(3, 5), Eigen::Vector3d(1.1, 0.4, -0.1), Eigen::Vector3d(-0.5, 0.2, 1.0))};
  const double t = 0.9;
  const ChannelMatrix ch = build_channel(dm, t);
  const int n = 97;
  const double a = 9.0, h = 2.0 * a / (n - 1);
  Eigen::Matrix2cd quad = Eigen::Matrix2cd::Zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Eigen::Vector3d g(-a + i * h, -a + j * h, -a + k * h);
        const Eigen::Vector2cd psi(psi_at(ch.factors[0], g), psi_at(ch.factors[1], g));
        quad += psi.conjugate() * psi.transpose() * (h * h * h);
      }
  CHECK((quad - ch.gamma).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("strongly driven mixed modes keep a unit diagonal") {
  DisentangledModes dm;
  dm.atoms = 4;
  dm.G = gram_schmidt_closed_form(4);
  dm.states = {
      mode_set(rotation(3, 8), Eigen::Vector3d(0.03, -0.003, -0.3), Eigen::Vector3d(370, -15, -313)),
      mode_set(rotation(3, 9), Eigen::Vector3d(0.06, -0.0002, -0.02), Eigen::Vector3d(786, -7, -35))};
  const ChannelMatrix ch = build_channel(dm, 1.03);
  // The general pair formula, not the unit diagonal build_channel stores.
  CHECK(std::abs(gamma_overlap(ch.factors[0], ch.factors[0]) - 1.0) < 1e-12);
  CHECK(std::abs(gamma_overlap(ch.factors[1], ch.factors[1]) - 1.0) < 1e-12);
  CHECK(std::abs(ch.gamma(0, 1)) <= 1.0);
}

TEST_CASE("classical centre, momentum and phase match the Gaussian") {
  // xbar = Re b / Re k, pbar = Im b - Im k xbar and
  // theta = Im c + Im k xbar^2 / 2 + pbar xbar from the RK4 oracle.
  for (const auto& [w2, f, t] : std::vector<std::tuple<double, double, double>>{
           {0.0, 1.3, 1.1}, {0.4, -2.0, 0.9}, {9.0, 3.0, 2.5}, {-0.2, 1.0, 1.5}, {-6.0, 2.0, 1.2}}) {
    const Gaussian g = integrate_mode(w2, f, t);
    const ModeCoefficients c = mode_coefficients(w2, f, t);
    const double x = g.b.real() / g.k.real();
    const double p = g.b.imag() - g.k.imag() * x;
    const double theta = g.c.imag() + 0.5 * g.k.imag() * x * x + p * x;
    CHECK(c.center == doctest::Approx(x).epsilon(1e-8));
    CHECK(c.momentum == doctest::Approx(p).epsilon(1e-8));
    CHECK(c.phase == doctest::Approx(theta).epsilon(1e-8));
    CHECK(c.log_re_kbar == doctest::Approx(std::log(g.k.real())).epsilon(1e-8));
  }
}

TEST_CASE("wide chirped and far displaced packets against quadrature") {
  // One mode. State 1 is inverted with kappa t = 14, so its width is ~1e6
  // and its centre and momentum nearly cancel near the origin; states 2 and
  // 3 are narrow and pushed ~100 widths out.
  DisentangledModes dm;
  dm.atoms = 2;
  dm.G = gram_schmidt_closed_form(2);
  const Eigen::MatrixXd one = Eigen::MatrixXd::Identity(1, 1);
  const auto mode = [&](double w2, double f) {
    return mode_set(one, Eigen::VectorXd::Constant(1, w2), Eigen::VectorXd::Constant(1, f));
  };
  dm.states = {mode(1.0, 0.5), mode(-196.0, 80.0), mode(1.0, 250.0), mode(1.0, 251.0)};
  const ChannelMatrix ch = build_channel(dm, 1.0);
  const auto integrate = [&](int n, int m) {
    const double c = ch.factors[n].center[0], h = 1e-3;
    cdouble sum = 0.0;
    for (double x = c - 14.0; x <= c + 14.0; x += h) {
      const Eigen::VectorXd g = Eigen::VectorXd::Constant(1, x);
      sum += std::conj(psi_at(ch.factors[n], g)) * psi_at(ch.factors[m], g) * h;
    }
    return sum;
  };
  CHECK(std::abs(ch.gamma(0, 1) - integrate(0, 1)) < 1e-9);
  CHECK(std::abs(ch.gamma(2, 1) - integrate(2, 1)) < 1e-9);
  CHECK(std::abs(ch.gamma(2, 3) - integrate(2, 3)) < 1e-9);
  CHECK(std::abs(ch.gamma(0, 1)) > 1e-4);
  CHECK(std::abs(ch.gamma(2, 3)) > 0.5);
}

TEST_CASE("channel is a valid Gram matrix") {
  DisentangledModes dm;
  dm.atoms = 3;
  dm.G = gram_schmidt_closed_form(3);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> w(-0.5, 2.0), f(-3.0, 3.0);
  for (int n = 0; n < 8; ++n)
    dm.states.push_back(mode_set(rotation(2, 20 + n), Eigen::Vector2d(w(rng), w(rng)),
                                 Eigen::Vector2d(f(rng), f(rng))));
  for (double t : {0.0, 0.5, 1.7}) {
    const ChannelMatrix ch = build_channel(dm, t, 3);
    CHECK((ch.gamma - ch.gamma.adjoint()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((ch.gamma.diagonal().array() - 1.0).abs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(ch.gamma);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    // Single- and multi-threaded builds agree bit for bit.
    CHECK(ch.gamma == build_channel(dm, t, 1).gamma);
    for (Eigen::Index m = 0; m < 8; ++m)
      CHECK((channel_column(dm, m, t) - ch.gamma.col(m)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("isotropic column shortcut") {
  DisentangledModes dm;
  dm.atoms = 4;
  dm.G = gram_schmidt_closed_form(4);
  dm.states = {mode_set(rotation(3, 30), Eigen::Vector3d::Constant(0.4), Eigen::Vector3d::Zero()),
               mode_set(rotation(3, 31), Eigen::Vector3d(0.3, -0.1, 0.9), Eigen::Vector3d(1, 2, -1)),
               mode_set(rotation(3, 32), Eigen::Vector3d(0.0, 0.2, 0.5), Eigen::Vector3d(0, -2, 0.5))};
  CHECK(isotropic(dm.states[0]));
  CHECK_FALSE(isotropic(dm.states[1]));
  for (double t : {0.2, 1.3})
    CHECK((channel_column(dm, 0, t) - channel_column_general(dm, 0, t)).cwiseAbs().maxCoeff() <
          1e-12);
}
