#include "rydchan/coupling.hpp"

#include <algorithm>
#include <numeric>

#include "rydchan/errors.hpp"

namespace rydchan {

namespace {

void check_bonds(Eigen::Index atoms, const std::vector<BondOperator>& bonds,
                 const Eigen::VectorXd& strengths) {
  if (atoms < 2) throw UsageError("coupling needs at least two atoms");
  if (Eigen::Index(bonds.size()) != atoms - 1 || strengths.size() != atoms - 1)
    throw UsageError("expected one bond operator and strength per nearest-neighbour bond");
}

// Column block of w: out[l] is dim x count with out[l](m, j) = w^l_{m, first+j}.
std::vector<Eigen::MatrixXd> w_block(const EigenSystem<double>& es,
                                     const std::vector<BondOperator>& bonds,
                                     const Eigen::VectorXd& strengths, Eigen::Index first,
                                     Eigen::Index count) {
  const Eigen::Index atoms = Eigen::Index(bonds.size()) + 1;
  std::vector<Eigen::MatrixXd> out(atoms, Eigen::MatrixXd::Zero(es.dim(), count));
  for (Eigen::Index b = 0; b + 1 < atoms; ++b) {
    const Eigen::MatrixXd p = bond_elements(es.vectors, bonds[b], first, count);
    out[b] -= strengths[b] * p;
    out[b + 1] += strengths[b] * p;
  }
  return out;
}

// f_n and M_n given column n of w for every atom, stacked as wn(l, m) = w^l_{mn}.
void quadratic_for_state(Eigen::Index n, const Eigen::VectorXd& energies,
                         const Eigen::MatrixXd& wn, const DegeneracyThresholds& thr,
                         Eigen::VectorXd& f, Eigen::MatrixXd& M) {
  const Eigen::Index dim = energies.size();
  f = wn.col(n);
  Eigen::VectorXd weight(dim);
  for (Eigen::Index m = 0; m < dim; ++m) {
    const double gap = energies[n] - energies[m];
    if (m == n) {
      weight[m] = 0.0;
    } else if (std::abs(gap) <= thr.energy) {
      const double c = wn.col(m).cwiseAbs().maxCoeff();
      if (c > thr.coupling) throw DegeneracyError(std::size_t(n), std::size_t(m), std::abs(gap), c);
      weight[m] = 0.0;
    } else {
      weight[m] = 1.0 / gap;
    }
  }
  M = wn * weight.asDiagonal() * wn.transpose();
  M = 0.5 * (M + M.transpose());
}

}  // namespace

CouplingTensor compute_w(const EigenSystem<double>& es, const std::vector<BondOperator>& bonds,
                         const Eigen::VectorXd& bond_strengths) {
  check_bonds(Eigen::Index(bonds.size()) + 1, bonds, bond_strengths);
  return w_block(es, bonds, bond_strengths, 0, es.dim());
}

DegeneracyThresholds default_thresholds(const Eigen::VectorXd& energies,
                                        const Eigen::VectorXd& bond_strengths) {
  DegeneracyThresholds t;
  t.energy = degeneracy_tolerance(energies);
  t.coupling = 1e-12 * std::max(bond_strengths.size() ? bond_strengths.cwiseAbs().maxCoeff() : 0.0,
                                1e-300);
  return t;
}

CouplingData compute_quadratic(const Eigen::VectorXd& energies, const CouplingTensor& w,
                               const DegeneracyThresholds& thresholds) {
  const Eigen::Index atoms = Eigen::Index(w.size());
  const Eigen::Index dim = energies.size();
  CouplingData out;
  out.atoms = atoms;
  out.forces.resize(dim);
  out.curvature.resize(dim);
  Eigen::MatrixXd wn(atoms, dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    // w is symmetric in (n, m) for real eigenvectors; use column n.
    for (Eigen::Index l = 0; l < atoms; ++l) wn.row(l) = w[l].col(n).transpose();
    quadratic_for_state(n, energies, wn, thresholds, out.forces[n], out.curvature[n]);
  }
  return out;
}

CouplingData compute_coupling(const EigenSystem<double>& es,
                              const std::vector<BondOperator>& bonds,
                              const Eigen::VectorXd& bond_strengths,
                              const DegeneracyThresholds& thresholds, Eigen::Index block) {
  const Eigen::Index atoms = Eigen::Index(bonds.size()) + 1;
  check_bonds(atoms, bonds, bond_strengths);
  const Eigen::Index dim = es.dim();
  CouplingData out;
  out.atoms = atoms;
  out.forces.resize(dim);
  out.curvature.resize(dim);
  Eigen::MatrixXd wn(atoms, dim);
  for (Eigen::Index first = 0; first < dim; first += block) {
    const Eigen::Index count = std::min(block, dim - first);
    const auto wb = w_block(es, bonds, bond_strengths, first, count);
    for (Eigen::Index j = 0; j < count; ++j) {
      for (Eigen::Index l = 0; l < atoms; ++l) wn.row(l) = wb[l].col(j).transpose();
      quadratic_for_state(first + j, es.energies, wn, thresholds, out.forces[first + j],
                          out.curvature[first + j]);
    }
  }
  return out;
}

Eigen::MatrixXd gram_schmidt(Eigen::Index L) {
  if (L < 2) throw UsageError("Gram-Schmidt basis needs L >= 2");
  Eigen::MatrixXd G(L - 1, L);
  for (Eigen::Index k = 0; k + 1 < L; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(L);
    v[k] = -1.0;
    v[k + 1] = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) v -= G.row(j).dot(v) * G.row(j).transpose();
    G.row(k) = v.normalized().transpose();
  }
  return G;
}

Eigen::MatrixXd gram_schmidt_closed_form(Eigen::Index L) {
  if (L < 2) throw UsageError("Gram-Schmidt basis needs L >= 2");
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(L - 1, L);
  for (Eigen::Index row = 0; row + 1 < L; ++row) {
    const double l = double(row + 1);
    const double norm = std::sqrt(l + l * l);
    for (Eigen::Index k = 0; k <= row; ++k) G(row, k) = -1.0 / norm;
    G(row, row + 1) = l / norm;
  }
  return G;
}

ModeSet disentangle(const Eigen::MatrixXd& M, const Eigen::MatrixXd& G, const Eigen::VectorXd& f) {
  const Eigen::Index modes = G.rows();
  const Eigen::MatrixXd S = G * M * G.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(0.5 * (S + S.transpose()));
  const Eigen::VectorXd& ev = solver.eigenvalues();
  std::vector<Eigen::Index> order(modes);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return ev[a] > ev[b]; });

  ModeSet out;
  out.Q.resize(modes, modes);
  out.d.resize(modes);
  for (Eigen::Index i = 0; i < modes; ++i) {
    out.d[i] = ev[order[i]];
    out.Q.row(i) = solver.eigenvectors().col(order[i]).transpose();
  }
  Eigen::MatrixXd qt = out.Q.transpose();
  fix_phases(qt);
  out.Q = qt.transpose();
  out.omega_sq = 2.0 * out.d;
  out.force = out.Q * (G * f);
  return out;
}

DisentangledModes disentangle(const CouplingData& coupling) {
  DisentangledModes out;
  out.atoms = coupling.atoms;
  out.G = gram_schmidt_closed_form(coupling.atoms);
  out.states.reserve(coupling.forces.size());
  for (std::size_t n = 0; n < coupling.forces.size(); ++n)
    out.states.push_back(disentangle(coupling.curvature[n], out.G, coupling.forces[n]));
  return out;
}

}  // namespace rydchan
