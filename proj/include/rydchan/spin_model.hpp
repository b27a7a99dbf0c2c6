#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "rydchan/errors.hpp"
#include "rydchan/units.hpp"

namespace rydchan {

/// Largest chain handled by the dense frozen-gas solver.
inline constexpr Eigen::Index kMaxAtoms = 14;

/// Computational product basis: atom 0 is the most significant bit, |g> = 0,
/// |r> = 1. Returns true if `atom` is excited in basis state `state`.
inline bool excited(Eigen::Index state, Eigen::Index atom, Eigen::Index L) {
  return (state >> (L - 1 - atom)) & 1;
}

/// Frozen-gas spin Hamiltonian sum_l (Omega_l sigma_x/2 - Delta_l n_l) +
/// sum_b V_b n_b n_{b+1}. All entries are real, so it is stored as a real
/// symmetric matrix.
struct SpinHamiltonian {
  Eigen::Index L = 0;
  Eigen::MatrixXd matrix;

  Eigen::Index dim() const { return matrix.rows(); }
};

SpinHamiltonian build_hamiltonian(const NormalizedChain& chain);

/// A real symmetric operator on the spin space attached to one bond. Pair
/// projectors n_b n_{b+1} are diagonal 0/1 and are stored by their support;
/// anything else (e.g. hopping terms of an effective model) is sparse.
struct BondOperator {
  bool diagonal = true;
  std::vector<Eigen::Index> support;
  Eigen::SparseMatrix<double> matrix;

  static BondOperator projector(std::vector<Eigen::Index> rows);
  static BondOperator general(Eigen::SparseMatrix<double> op);

  Eigen::Index dim() const;
  Eigen::MatrixXd dense(Eigen::Index dim) const;
};

/// Projectors n_b n_{b+1} for the L-1 nearest-neighbour bonds.
std::vector<BondOperator> pair_projectors(Eigen::Index L);

/// Eigenpairs of a Hermitian matrix: ascending energies, orthonormal columns.
template <typename Scalar>
struct EigenSystem {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  Eigen::VectorXd energies;
  Matrix vectors;

  Eigen::Index dim() const { return energies.size(); }
};

/// Multiplies each column by a phase so that its largest-magnitude component
/// (lowest index among near-ties) is real and positive.
template <typename Derived>
void fix_phases(Eigen::MatrixBase<Derived>& vectors) {
  using std::abs;
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    auto col = vectors.col(j);
    double largest = 0.0;
    for (Eigen::Index i = 0; i < col.size(); ++i) largest = std::max(largest, double(abs(col[i])));
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < col.size(); ++i) {
      if (double(abs(col[i])) >= largest * (1.0 - 1e-9)) {
        pick = i;
        break;
      }
    }
    const auto v = col[pick];
    if constexpr (Eigen::NumTraits<typename Derived::Scalar>::IsComplex) {
      col *= std::conj(v) / abs(v);
    } else {
      if (v < 0) col = -col;
    }
  }
}

/// Full Hermitian eigendecomposition with the deterministic phase convention.
/// Throws NumericalError when the input is not Hermitian to 1e-12 relative.
template <typename Derived>
EigenSystem<typename Derived::Scalar> hermitian_eigen(const Eigen::MatrixBase<Derived>& h) {
  using Scalar = typename Derived::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  if (h.rows() != h.cols()) throw NumericalError("eigendecomposition needs a square matrix");
  const double scale = std::max(1.0, double(h.cwiseAbs().maxCoeff()));
  if (double((h - h.adjoint()).cwiseAbs().maxCoeff()) > 1e-12 * scale)
    throw NumericalError("matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h.derived());
  if (solver.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  EigenSystem<Scalar> es;
  es.energies = solver.eigenvalues();
  es.vectors = solver.eigenvectors();
  fix_phases(es.vectors);
  return es;
}

/// Inside every cluster of energies closer than `tolerance`, rotates the
/// eigenvectors so that a generic combination of the bond operators is
/// diagonal. Couplings w_nm between degenerate partners then vanish whenever
/// the bond operators commute on the cluster (e.g. zero drive).
void canonicalize_degenerate(EigenSystem<double>& es, const std::vector<BondOperator>& bonds,
                             double tolerance);

/// Degeneracy threshold used throughout: 1e-8 of the spectral range.
double degeneracy_tolerance(const Eigen::VectorXd& energies);

/// Eigendecomposition of the frozen-gas Hamiltonian with canonical
/// degenerate subspaces and phases.
EigenSystem<double> diagonalize(const SpinHamiltonian& h);

/// <m|O|n> for all m and for the `count` eigenstates starting at `first`.
Eigen::MatrixXd bond_elements(const Eigen::MatrixXd& vectors, const BondOperator& op,
                              Eigen::Index first, Eigen::Index count);

/// P^b_{nm} = <n| n_b n_{b+1} |m> for every bond, as dense dim x dim matrices.
std::vector<Eigen::MatrixXd> pair_elements(const EigenSystem<double>& es, Eigen::Index L);

}  // namespace rydchan
