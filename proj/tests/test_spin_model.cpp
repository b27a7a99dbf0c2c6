#include <doctest.h>

#include <unsupported/Eigen/KroneckerProduct>

#include "rydchan/errors.hpp"
#include "rydchan/spin_model.hpp"

using namespace rydchan;

namespace {

NormalizedChain chain(Eigen::Index L, double omega, double delta, double v) {
  NormalizedChain c;
  c.L = L;
  c.spacings = Eigen::VectorXd::Constant(L - 1, 90.0);
  c.v0 = Eigen::VectorXd::LinSpaced(L - 1, v, 1.3 * v);
  c.force = 6.0 * c.v0.cwiseQuotient(c.spacings);
  c.omega = Eigen::VectorXd::LinSpaced(L, omega, 0.7 * omega);
  c.delta = Eigen::VectorXd::LinSpaced(L, delta, -0.4 * delta);
  return c;
}

// Same Hamiltonian from Kronecker products of single-atom operators.
Eigen::MatrixXd kron_hamiltonian(const NormalizedChain& c) {
  Eigen::Matrix2d sx, n, id;
  sx << 0, 1, 1, 0;
  n << 0, 0, 0, 1;
  id.setIdentity();
  const auto embed = [&](const std::vector<Eigen::Matrix2d>& ops) {
    Eigen::MatrixXd out = ops[0];
    for (std::size_t i = 1; i < ops.size(); ++i)
      out = Eigen::kroneckerProduct(out, ops[i]).eval();
    return out;
  };
  const Eigen::Index dim = Eigen::Index(1) << c.L;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index l = 0; l < c.L; ++l) {
    std::vector<Eigen::Matrix2d> a(c.L, id), b(c.L, id);
    a[l] = sx;
    b[l] = n;
    h += 0.5 * c.omega[l] * embed(a) - c.delta[l] * embed(b);
  }
  for (Eigen::Index l = 0; l + 1 < c.L; ++l) {
    std::vector<Eigen::Matrix2d> a(c.L, id);
    a[l] = n;
    a[l + 1] = n;
    h += c.v0[l] * embed(a);
  }
  return h;
}

}  // namespace

TEST_CASE("basis order puts atom 0 in the most significant bit") {
  CHECK(excited(2, 0, 2));   // |rg>
  CHECK_FALSE(excited(2, 1, 2));
  CHECK(excited(1, 1, 2));   // |gr>
  CHECK(excited(4, 0, 3));
}

TEST_CASE("Hamiltonian matches the Kronecker construction") {
  for (Eigen::Index L : {2, 3, 5}) {
    const NormalizedChain c = chain(L, 60.0, 25.0, 1800.0);
    const SpinHamiltonian h = build_hamiltonian(c);
    CHECK(h.dim() == (Eigen::Index(1) << L));
    CHECK((h.matrix - kron_hamiltonian(c)).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("capacity of the dense model") {
  CHECK_THROWS_AS(build_hamiltonian(chain(kMaxAtoms + 1, 1.0, 1.0, 1.0)), CapacityError);
}

TEST_CASE("eigensystem is orthonormal with fixed phases") {
  const SpinHamiltonian h = build_hamiltonian(chain(4, 60.0, -25.0, 1800.0));
  const EigenSystem<double> es = diagonalize(h);
  const Eigen::Index dim = es.dim();
  CHECK((es.vectors.transpose() * es.vectors - Eigen::MatrixXd::Identity(dim, dim))
            .cwiseAbs()
            .maxCoeff() < 1e-12);
  CHECK((h.matrix * es.vectors - es.vectors * es.energies.asDiagonal()).cwiseAbs().maxCoeff() <
        1e-9);
  for (Eigen::Index j = 1; j < dim; ++j) CHECK(es.energies[j] >= es.energies[j - 1]);
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::Index k;
    es.vectors.col(j).cwiseAbs().maxCoeff(&k);
    CHECK(es.vectors(k, j) > 0.0);
  }
}

TEST_CASE("degenerate clusters are rotated so bond operators are diagonal") {
  // No drive: every product state is an eigenstate and several share an energy.
  NormalizedChain c = chain(3, 0.0, 0.0, 100.0);
  c.v0.setConstant(100.0);
  const EigenSystem<double> es = diagonalize(build_hamiltonian(c));
  for (const auto& p : pair_elements(es, 3)) {
    Eigen::MatrixXd off = p;
    off.diagonal().setZero();
    CHECK(off.cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("pair projectors") {
  const auto bonds = pair_projectors(3);
  REQUIRE(bonds.size() == 2);
  // n_0 n_1 is 1 on |rrg> = 6 and |rrr> = 7.
  const Eigen::MatrixXd p0 = bonds[0].dense(8);
  CHECK(p0.trace() == 2.0);
  CHECK(p0(6, 6) == 1.0);
  CHECK(p0(7, 7) == 1.0);
  const Eigen::MatrixXd p1 = bonds[1].dense(8);
  CHECK(p1(3, 3) == 1.0);
  CHECK(p1(7, 7) == 1.0);
}

TEST_CASE("hermitian_eigen rejects non-Hermitian input") {
  Eigen::Matrix2d a;
  a << 1, 2, 0, 1;
  CHECK_THROWS_AS(hermitian_eigen(a), NumericalError);
}
