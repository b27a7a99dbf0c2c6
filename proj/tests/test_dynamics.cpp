#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include "rydchan/dynamics.hpp"

using namespace rydchan;

namespace {

NormalizedChain chain(Eigen::Index L, double omega, double delta, double v) {
  NormalizedChain c;
  c.L = L;
  c.spacings = Eigen::VectorXd::Constant(L - 1, 94.0);
  c.v0 = Eigen::VectorXd::Constant(L - 1, v);
  c.force = 6.0 * c.v0 / 94.0;
  c.omega = Eigen::VectorXd::Constant(L, omega);
  c.delta = Eigen::VectorXd::Constant(L, delta);
  return c;
}

DensityMatrix random_state(Eigen::Index dim, unsigned seed) {
  std::srand(seed);
  const Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(dim, dim);
  DensityMatrix rho{a * a.adjoint(), Basis::computational};
  rho.matrix /= rho.matrix.trace();
  return rho;
}

}  // namespace

TEST_CASE("frozen-gas evolution matches the matrix exponential") {
  const NormalizedChain c = chain(3, 40.0, -15.0, 900.0);
  const SpinHamiltonian h = build_hamiltonian(c);
  const EigenSystem<double> es = diagonalize(h);
  const DensityMatrix rho0 = random_state(8, 3);
  for (double t : {0.0, 0.013, 0.4}) {
    const Eigen::MatrixXcd u = (cdouble(0, -t) * h.matrix.cast<cdouble>()).exp();
    const Eigen::MatrixXcd expected = u * rho0.matrix * u.adjoint();
    const DensityMatrix out = to_computational(evolve_fga(rho0, es, t), es.vectors);
    CHECK((out.matrix - expected).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("basis changes round trip") {
  const EigenSystem<double> es = diagonalize(build_hamiltonian(chain(2, 5.0, 1.0, 30.0)));
  const DensityMatrix rho = random_state(4, 5);
  const DensityMatrix e = to_eigen(rho, es.vectors);
  CHECK(e.basis == Basis::eigen);
  CHECK((to_computational(e, es.vectors).matrix - rho.matrix).cwiseAbs().maxCoeff() < 1e-14);
  CHECK((to_eigen(e, es.vectors).matrix - e.matrix).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("channel application is elementwise with the transpose") {
  DensityMatrix rho = random_state(4, 9);
  rho.basis = Basis::eigen;
  Eigen::MatrixXcd gamma = Eigen::MatrixXcd::Ones(4, 4);
  CHECK(apply_channel(rho, gamma).matrix == rho.matrix);
  gamma(0, 1) = cdouble(0.5, 0.25);
  gamma(1, 0) = std::conj(gamma(0, 1));
  const DensityMatrix out = apply_channel(rho, gamma);
  CHECK(out.matrix(1, 0) == gamma(0, 1) * rho.matrix(1, 0));
  CHECK(out.matrix(0, 1) == gamma(1, 0) * rho.matrix(0, 1));
  DensityMatrix comp = rho;
  comp.basis = Basis::computational;
  CHECK_THROWS_AS(apply_channel(comp, gamma), UsageError);
}

TEST_CASE("fidelity and distance") {
  const DensityMatrix a = pure_state(Eigen::Vector2cd(1, 0));
  const DensityMatrix b = pure_state(Eigen::Vector2cd(0, 1));
  const DensityMatrix c = pure_state(Eigen::Vector2cd(1, 1) / std::sqrt(2.0));
  CHECK(trace_fidelity(a, a) == doctest::Approx(1.0));
  CHECK(trace_fidelity(a, b) == doctest::Approx(0.0));
  CHECK(trace_fidelity(a, c) == doctest::Approx(0.5));
  CHECK(trace_distance(a, b) == doctest::Approx(1.0));
  CHECK(trace_distance(a, c) == doctest::Approx(std::sqrt(0.5)));
  DensityMatrix bad = a;
  bad.matrix *= 2.0;
  CHECK_THROWS_AS(check_density(bad), NumericalError);
  CHECK_NOTHROW(check_density(c));
}

TEST_CASE("exchange rate and its derivative") {
  const double omega = 0.3, delta = -0.7, v = 2.1;
  CHECK(spin_exchange_rate(omega, delta, v) ==
        doctest::Approx(omega * omega * v / (4.0 * delta * (delta - v))));
  const double h = 1e-6;
  const double fd =
      (spin_exchange_rate(omega, delta, v + h) - spin_exchange_rate(omega, delta, v - h)) /
      (2.0 * h);
  CHECK(spin_exchange_rate_dv(omega, delta, v) == doctest::Approx(fd).epsilon(1e-8));
  CHECK_THROWS_AS(spin_exchange_rate(omega, 0.0, v), DomainError);
  CHECK_THROWS_AS(spin_exchange_rate(omega, v, v), DomainError);
}

TEST_CASE("breakdown time closed form agrees with the root") {
  const double r0 = 94.0, v0 = 1800.0, mass = 1.0, gap = 35.0, element = 0.4;
  const double force = 6.0 * v0 / r0;
  CHECK(breakdown_time_vdw(r0, v0, mass, gap, element) ==
        doctest::Approx(breakdown_time_root(force, mass, gap, element)).epsilon(1e-9));
  const NormalizedChain c = chain(2, 20.0, 0.0, 1800.0);
  const BreakdownEstimate b = breakdown_time(diagonalize(build_hamiltonian(c)), c);
  CHECK(std::isfinite(b.t_star));
  CHECK(b.t_star > 0.0);
  CHECK(b.branches.size() == 3);
  CHECK_THROWS_AS(breakdown_time(diagonalize(build_hamiltonian(chain(3, 1, 0, 5))), chain(3, 1, 0, 5)),
                  UsageError);
}

TEST_CASE("exchange cycles of a damped oscillation") {
  std::vector<double> t, v;
  const double period = 2.0, tau = 9.0;
  for (int i = 0; i <= 2000; ++i) {
    t.push_back(0.01 * i);
    v.push_back(0.5 + 0.5 * std::exp(-t.back() / tau) * std::cos(2.0 * constants::pi * t.back() / period));
  }
  const ExchangeCycles c = exchange_cycle_metrics(t, v, 0.75, 1.0);
  REQUIRE(c.peak_times.size() >= 9);
  // Damping moves each maximum earlier by atan(1/(w tau))/w.
  const double w = 2.0 * constants::pi / period, shift = std::atan(1.0 / (w * tau)) / w;
  for (std::size_t k = 0; k < 5; ++k)
    CHECK(c.peak_times[k] == doctest::Approx(period * (k + 1) - shift).epsilon(1e-4));
  // 0.5 + 0.5 exp(-2k/9) >= 0.75 while k <= 3.
  CHECK(c.cycles == 3);
}

TEST_CASE("ripple at the population minimum is not a return") {
  // A small fast ripple puts local maxima next to every trough, about half
  // a period from the returns.
  std::vector<double> t, v;
  const double period = 1.0;
  for (int i = 0; i <= 3000; ++i) {
    t.push_back(0.001 * i);
    const double x = constants::pi * t.back() / period;
    v.push_back(std::cos(x) * std::cos(x) * (1.0 - 0.002) + 0.002 * std::pow(std::sin(37.0 * x), 2));
  }
  const ExchangeCycles c = exchange_cycle_metrics(t, v, 0.0, 0.5 * period);
  REQUIRE(c.peak_times.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) CHECK(std::abs(c.peak_times[k] - double(k + 1)) < 0.02);
}

TEST_CASE("branch labels of a weakly driven pair") {
  const EigenSystem<double> es = diagonalize(build_hamiltonian(chain(2, 0.5, 20.0, 300.0)));
  const auto labels = branch_labels(es);
  int count[4] = {0, 0, 0, 0};
  for (auto l : labels) ++count[int(l)];
  for (int k = 0; k < 4; ++k) CHECK(count[k] == 1);
  CHECK(to_string(BranchLabel::rr) == "rr");
}
