#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rydchan/spin_model.hpp"

namespace rydchan {

/// w^l_{nm}, one dim x dim matrix per atom l. With bond operators O_b and
/// bond strengths F_b (bond b joins atoms b and b+1):
///   w^l = F_{l-1} <O_{l-1}> - F_l <O_l>,  with F_{-1} = F_{L-1} = 0.
/// First-order energy is E^(1)_n(x) = -sum_l w^l_nn x_l.
using CouplingTensor = std::vector<Eigen::MatrixXd>;

CouplingTensor compute_w(const EigenSystem<double>& es, const std::vector<BondOperator>& bonds,
                         const Eigen::VectorXd& bond_strengths);

/// Linear and quadratic terms of the perturbed energy
///   E'_n(x) = E_n - f_n^T x + x^T M_n x.
struct CouplingData {
  Eigen::Index atoms = 0;
  std::vector<Eigen::VectorXd> forces;     // f_n = w_nn (diagonal of w in n)
  std::vector<Eigen::MatrixXd> curvature;  // M_n = Re sum_{m!=n} w_mn w_nm^T / (E_n - E_m)
};

struct DegeneracyThresholds {
  double energy = 0.0;    // |E_n - E_m| at or below this counts as degenerate
  double coupling = 0.0;  // |w| above this makes a degenerate pair fatal
};

/// Defaults: 1e-8 of the spectral range and 1e-12 of max|F_b|.
DegeneracyThresholds default_thresholds(const Eigen::VectorXd& energies,
                                        const Eigen::VectorXd& bond_strengths);

/// f_n and M_n from a precomputed w tensor.
CouplingData compute_quadratic(const Eigen::VectorXd& energies, const CouplingTensor& w,
                               const DegeneracyThresholds& thresholds);

/// Same result as compute_quadratic(compute_w(...)) but streams w in column
/// blocks, so memory stays O(L * dim * block) instead of O(L * dim^2).
CouplingData compute_coupling(const EigenSystem<double>& es,
                              const std::vector<BondOperator>& bonds,
                              const Eigen::VectorXd& bond_strengths,
                              const DegeneracyThresholds& thresholds, Eigen::Index block = 256);

/// Orthonormal rows spanning the complement of the centre-of-mass direction,
/// obtained by Gram-Schmidt on the successive separations x_{l+1} - x_l.
Eigen::MatrixXd gram_schmidt(Eigen::Index L);

/// Closed form of the same basis: row l (1-based) is
/// -1/sqrt(l+l^2) for k <= l, l/sqrt(l+l^2) for k = l+1, 0 beyond.
Eigen::MatrixXd gram_schmidt_closed_form(Eigen::Index L);

/// Decoupled normal modes of one eigenstate: s = Q g = T x with T = Q G, and
/// x^T M x = s^T diag(d) s.
struct ModeSet {
  Eigen::MatrixXd Q;         // (L-1) x (L-1) orthogonal
  Eigen::VectorXd d;         // eigenvalues of S = G M G^T, descending
  Eigen::VectorXd omega_sq;  // 2 d: the potential d s^2 equals omega^2 s^2 / 2
  Eigen::VectorXd force;     // F = T f, the linear force on each mode
};

struct DisentangledModes {
  Eigen::Index atoms = 0;
  Eigen::MatrixXd G;
  std::vector<ModeSet> states;

  Eigen::Index modes() const { return atoms - 1; }
};

ModeSet disentangle(const Eigen::MatrixXd& M, const Eigen::MatrixXd& G, const Eigen::VectorXd& f);

DisentangledModes disentangle(const CouplingData& coupling);

}  // namespace rydchan
