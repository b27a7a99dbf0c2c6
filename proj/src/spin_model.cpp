#include "rydchan/spin_model.hpp"

#include <array>
#include <string>

namespace rydchan {

SpinHamiltonian build_hamiltonian(const NormalizedChain& chain) {
  const Eigen::Index L = chain.L;
  if (L < 2 || L > kMaxAtoms)
    throw CapacityError("full spin model supports 2 <= L <= " + std::to_string(kMaxAtoms) +
                        ", got L = " + std::to_string(L));
  const Eigen::Index dim = Eigen::Index(1) << L;
  SpinHamiltonian h;
  h.L = L;
  h.matrix = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index s = 0; s < dim; ++s) {
    double diag = 0.0;
    for (Eigen::Index l = 0; l < L; ++l) {
      if (excited(s, l, L)) diag -= chain.delta[l];
      const Eigen::Index flipped = s ^ (Eigen::Index(1) << (L - 1 - l));
      h.matrix(flipped, s) += 0.5 * chain.omega[l];
    }
    for (Eigen::Index b = 0; b + 1 < L; ++b) {
      if (excited(s, b, L) && excited(s, b + 1, L)) diag += chain.v0[b];
    }
    h.matrix(s, s) = diag;
  }
  return h;
}

BondOperator BondOperator::projector(std::vector<Eigen::Index> rows) {
  BondOperator op;
  op.diagonal = true;
  op.support = std::move(rows);
  return op;
}

BondOperator BondOperator::general(Eigen::SparseMatrix<double> m) {
  BondOperator op;
  op.diagonal = false;
  op.matrix = std::move(m);
  return op;
}

Eigen::Index BondOperator::dim() const { return diagonal ? -1 : matrix.rows(); }

Eigen::MatrixXd BondOperator::dense(Eigen::Index dim) const {
  if (!diagonal) return Eigen::MatrixXd(matrix);
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(dim, dim);
  for (auto i : support) out(i, i) = 1.0;
  return out;
}

std::vector<BondOperator> pair_projectors(Eigen::Index L) {
  const Eigen::Index dim = Eigen::Index(1) << L;
  std::vector<BondOperator> bonds;
  for (Eigen::Index b = 0; b + 1 < L; ++b) {
    std::vector<Eigen::Index> rows;
    for (Eigen::Index s = 0; s < dim; ++s)
      if (excited(s, b, L) && excited(s, b + 1, L)) rows.push_back(s);
    bonds.push_back(BondOperator::projector(std::move(rows)));
  }
  return bonds;
}

double degeneracy_tolerance(const Eigen::VectorXd& energies) {
  const double range = energies.size() ? energies.maxCoeff() - energies.minCoeff() : 0.0;
  return 1e-8 * std::max(range, 1.0);
}

namespace {

// Square roots of distinct primes are linearly independent over the
// rationals, so distinct subsets of commuting projectors get distinct sums.
double generic_weight(std::size_t b) {
  static constexpr std::array<int, 16> primes{2, 3, 5, 7, 11, 13, 17, 19,
                                              23, 29, 31, 37, 41, 43, 47, 53};
  return std::sqrt(double(primes[b % primes.size()])) + double(b / primes.size());
}

}  // namespace

void canonicalize_degenerate(EigenSystem<double>& es, const std::vector<BondOperator>& bonds,
                             double tolerance) {
  const Eigen::Index dim = es.dim();
  Eigen::Index start = 0;
  while (start < dim) {
    Eigen::Index end = start + 1;
    while (end < dim && es.energies[end] - es.energies[end - 1] <= tolerance) ++end;
    const Eigen::Index k = end - start;
    if (k > 1 && !bonds.empty()) {
      Eigen::MatrixXd x = Eigen::MatrixXd::Zero(k, k);
      for (std::size_t b = 0; b < bonds.size(); ++b)
        x += generic_weight(b) * bond_elements(es.vectors, bonds[b], start, k).middleRows(start, k);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> sub(0.5 * (x + x.transpose()));
      es.vectors.middleCols(start, k) = es.vectors.middleCols(start, k) * sub.eigenvectors();
    }
    start = end;
  }
}

EigenSystem<double> diagonalize(const SpinHamiltonian& h) {
  auto es = hermitian_eigen(h.matrix);
  canonicalize_degenerate(es, pair_projectors(h.L), degeneracy_tolerance(es.energies));
  fix_phases(es.vectors);
  return es;
}

Eigen::MatrixXd bond_elements(const Eigen::MatrixXd& vectors, const BondOperator& op,
                              Eigen::Index first, Eigen::Index count) {
  if (op.diagonal) {
    if (op.support.empty()) return Eigen::MatrixXd::Zero(vectors.cols(), count);
    const Eigen::MatrixXd rows = vectors(op.support, Eigen::all);
    return rows.transpose() * rows.middleCols(first, count);
  }
  const Eigen::MatrixXd applied = op.matrix * vectors.middleCols(first, count);
  return vectors.transpose() * applied;
}

std::vector<Eigen::MatrixXd> pair_elements(const EigenSystem<double>& es, Eigen::Index L) {
  std::vector<Eigen::MatrixXd> out;
  for (const auto& bond : pair_projectors(L))
    out.push_back(bond_elements(es.vectors, bond, 0, es.dim()));
  return out;
}

}  // namespace rydchan
