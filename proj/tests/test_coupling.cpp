#include <doctest.h>

#include <random>

#include "rydchan/coupling.hpp"

using namespace rydchan;

namespace {

NormalizedChain driven_chain(Eigen::Index L) {
  NormalizedChain c;
  c.L = L;
  c.spacings = Eigen::VectorXd::Constant(L - 1, 90.0);
  c.v0 = Eigen::VectorXd::LinSpaced(L - 1, 1500.0, 2100.0);
  c.force = 6.0 * c.v0.cwiseQuotient(c.spacings);
  c.omega = Eigen::VectorXd::LinSpaced(L, 300.0, 170.0);
  c.delta = Eigen::VectorXd::LinSpaced(L, -400.0, 350.0);
  return c;
}

// Spectrum with each bond interaction linearized around the rest positions.
Eigen::VectorXd displaced_energies(const NormalizedChain& c, const Eigen::VectorXd& x) {
  NormalizedChain d = c;
  for (Eigen::Index b = 0; b + 1 < c.L; ++b) d.v0[b] -= c.force[b] * (x[b + 1] - x[b]);
  return diagonalize(build_hamiltonian(d)).energies;
}

}  // namespace

TEST_CASE("forces and curvatures match finite differences of the spectrum") {
  const NormalizedChain c = driven_chain(3);
  const EigenSystem<double> es = diagonalize(build_hamiltonian(c));
  const CouplingData cd = compute_coupling(es, pair_projectors(3), c.force,
                                           default_thresholds(es.energies, c.force));
  const double h = 1e-3;
  const Eigen::Index dim = es.dim();
  for (Eigen::Index i = 0; i < 3; ++i) {
    const Eigen::VectorXd ei = Eigen::VectorXd::Unit(3, i) * h;
    const Eigen::VectorXd grad =
        (displaced_energies(c, ei) - displaced_energies(c, -ei)) / (2.0 * h);
    for (Eigen::Index n = 0; n < dim; ++n)
      CHECK(-grad[n] == doctest::Approx(cd.forces[n][i]).epsilon(1e-6).scale(1.0));
    for (Eigen::Index j = 0; j < 3; ++j) {
      const Eigen::VectorXd ej = Eigen::VectorXd::Unit(3, j) * h;
      const Eigen::VectorXd hess =
          (displaced_energies(c, ei + ej) - displaced_energies(c, ei - ej) -
           displaced_energies(c, ej - ei) + displaced_energies(c, -ei - ej)) /
          (4.0 * h * h);
      for (Eigen::Index n = 0; n < dim; ++n)
        CHECK(hess[n] == doctest::Approx(2.0 * cd.curvature[n](i, j)).epsilon(1e-4).scale(1.0));
    }
  }
}

TEST_CASE("streamed coupling equals the full tensor route") {
  const NormalizedChain c = driven_chain(4);
  const EigenSystem<double> es = diagonalize(build_hamiltonian(c));
  const auto bonds = pair_projectors(4);
  const auto th = default_thresholds(es.energies, c.force);
  const CouplingData full = compute_quadratic(es.energies, compute_w(es, bonds, c.force), th);
  const CouplingData streamed = compute_coupling(es, bonds, c.force, th, 3);
  for (std::size_t n = 0; n < full.forces.size(); ++n) {
    CHECK((full.forces[n] - streamed.forces[n]).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((full.curvature[n] - streamed.curvature[n]).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("curvature has no centre-of-mass component") {
  const NormalizedChain c = driven_chain(4);
  const EigenSystem<double> es = diagonalize(build_hamiltonian(c));
  const CouplingData cd = compute_coupling(es, pair_projectors(4), c.force,
                                           default_thresholds(es.energies, c.force));
  for (std::size_t n = 0; n < cd.forces.size(); ++n) {
    CHECK(std::abs(cd.forces[n].sum()) < 1e-9 * (1.0 + cd.forces[n].cwiseAbs().maxCoeff()));
    CHECK((cd.curvature[n] * Eigen::VectorXd::Ones(4)).cwiseAbs().maxCoeff() <
          1e-9 * (1.0 + cd.curvature[n].cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("Gram-Schmidt basis") {
  for (Eigen::Index L = 2; L <= 50; ++L) {
    const Eigen::MatrixXd g = gram_schmidt(L);
    REQUIRE(g.rows() == L - 1);
    REQUIRE(g.cols() == L);
    CHECK((g - gram_schmidt_closed_form(L)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((g * g.transpose() - Eigen::MatrixXd::Identity(L - 1, L - 1)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((g * Eigen::VectorXd::Ones(L)).cwiseAbs().maxCoeff() < 1e-12);
  }
  // Row 1 of the closed form: (-1/sqrt2, 1/sqrt2, 0).
  const Eigen::MatrixXd g3 = gram_schmidt_closed_form(3);
  CHECK(g3(0, 0) == doctest::Approx(-std::sqrt(0.5)));
  CHECK(g3(0, 1) == doctest::Approx(std::sqrt(0.5)));
  CHECK(g3(0, 2) == 0.0);
}

TEST_CASE("disentangled modes reproduce the quadratic form") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  for (Eigen::Index L : {2, 3, 5}) {
    const NormalizedChain c = driven_chain(L);
    const EigenSystem<double> es = diagonalize(build_hamiltonian(c));
    const CouplingData cd = compute_coupling(es, pair_projectors(L), c.force,
                                             default_thresholds(es.energies, c.force));
    const DisentangledModes dm = disentangle(cd);
    for (int draw = 0; draw < 100; ++draw) {
      const Eigen::Index n = draw % es.dim();
      Eigen::VectorXd x(L);
      for (auto& v : x) v = normal(rng);
      const ModeSet& s = dm.states[n];
      const Eigen::VectorXd g = dm.G * x;
      const Eigen::VectorXd modes = s.Q * g;
      const double lhs = x.dot(cd.curvature[n] * x);
      const double rhs = modes.dot(s.d.asDiagonal() * modes);
      CHECK(rhs == doctest::Approx(lhs).epsilon(1e-10).scale(1e-12));
      // Linear term: f^T x = F^T s.
      CHECK(s.force.dot(modes) ==
            doctest::Approx(cd.forces[n].dot(x)).epsilon(1e-10).scale(1e-12));
      CHECK((s.omega_sq - 2.0 * s.d).cwiseAbs().maxCoeff() == 0.0);
      for (Eigen::Index k = 1; k < s.d.size(); ++k) CHECK(s.d[k] <= s.d[k - 1]);
    }
  }
}
