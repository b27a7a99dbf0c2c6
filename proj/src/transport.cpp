#include "rydchan/transport.hpp"

#include <algorithm>
#include <numeric>

#include "rydchan/dynamics.hpp"
#include "rydchan/errors.hpp"
#include "rydchan/parallel.hpp"

namespace rydchan {

EffectiveChain effective_chain_direct(const Eigen::VectorXd& mu, const Eigen::VectorXd& J,
                                      const Eigen::VectorXd& dJ,
                                      const Eigen::VectorXd& spacings) {
  const Eigen::Index L = mu.size();
  if (L < 2) throw UsageError("effective chain needs L >= 2");
  if (J.size() != L - 1 || dJ.size() != L - 1 || spacings.size() != L - 1)
    throw UsageError("effective chain needs L-1 bond values");
  return {mu, J, dJ, spacings, 0.0};
}

EffectiveChain effective_chain_physical(const Eigen::VectorXd& omega_per_bond, double delta,
                                        const Eigen::VectorXd& v0, const Eigen::VectorXd& spacings,
                                        int alpha) {
  const Eigen::Index bonds = omega_per_bond.size();
  if (v0.size() != bonds || spacings.size() != bonds)
    throw UsageError("effective chain needs one V and spacing per bond");
  Eigen::VectorXd J(bonds), dJ(bonds);
  for (Eigen::Index b = 0; b < bonds; ++b) {
    J[b] = spin_exchange_rate(omega_per_bond[b], delta, v0[b]);
    dJ[b] = spin_exchange_rate_dv(omega_per_bond[b], delta, v0[b]) * (-alpha * v0[b] / spacings[b]);
  }
  return effective_chain_direct(Eigen::VectorXd::Zero(bonds + 1), J, dJ, spacings);
}

Eigen::VectorXd pst_profile(Eigen::Index L, double j_max) {
  if (L < 2) throw UsageError("PST profile needs L >= 2");
  Eigen::VectorXd j(L - 1);
  for (Eigen::Index l = 1; l < L; ++l) j[l - 1] = std::sqrt(double(l * (L - l)));
  return j * (j_max / j.maxCoeff());
}

double pst_transfer_time(const EffectiveChain& chain) {
  const double c = std::abs(chain.J[0]) / std::sqrt(double(chain.L() - 1));
  return constants::pi / (2.0 * c);
}

EffectiveChain pst_chain(const TransportPhysics& ph, double trap_frequency, Eigen::Index L) {
  const double sigma0 = trap_width(trap_frequency, ph.atom_mass);
  const double omega_t = 2.0 * constants::pi * trap_frequency;
  const double v = power_law_interaction(ph.interaction_coefficient, ph.alpha, ph.spacing) /
                   (constants::hbar * omega_t);
  const double delta = ph.delta_over_v * v;
  const double omega_max = ph.omega_over_delta * std::abs(delta);
  // J is quadratic in Omega, so Omega_b scales with the square root of the profile.
  const Eigen::VectorXd shape = pst_profile(L, 1.0);
  const Eigen::VectorXd omega = omega_max * shape.cwiseSqrt();
  return effective_chain_physical(omega, delta, Eigen::VectorXd::Constant(L - 1, v),
                                  Eigen::VectorXd::Constant(L - 1, ph.spacing / sigma0), ph.alpha);
}

TransportSystem build_transport_system(const EffectiveChain& chain) {
  const Eigen::Index L = chain.L();
  if (L > kMaxTransportLength)
    throw CapacityError("transport chains support L <= " + std::to_string(kMaxTransportLength));
  TransportSystem sys;
  sys.L = L;
  const Eigen::Index dim = L + 1;
  Eigen::MatrixXd block = chain.mu.asDiagonal();
  for (Eigen::Index b = 0; b + 1 < L; ++b) block(b, b + 1) = block(b + 1, b) = chain.J[b];
  sys.hamiltonian = Eigen::MatrixXd::Zero(dim, dim);
  sys.hamiltonian(0, 0) = chain.aux_energy;
  sys.hamiltonian.bottomRightCorner(L, L) = block;

  // The auxiliary state is its own block; sort the combined spectrum.
  const auto inner = hermitian_eigen(block);
  std::vector<Eigen::Index> order(dim);
  std::iota(order.begin(), order.end(), 0);
  const auto energy = [&](Eigen::Index i) { return i == 0 ? chain.aux_energy : inner.energies[i - 1]; };
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return energy(a) < energy(b); });
  sys.es.energies.resize(dim);
  sys.es.vectors = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    const Eigen::Index i = order[k];
    sys.es.energies[k] = energy(i);
    if (i == 0) {
      sys.es.vectors(0, k) = 1.0;
      sys.aux_state = k;
    } else {
      sys.es.vectors.col(k).tail(L) = inner.vectors.col(i - 1);
    }
  }

  // Bond operators: hopping between chain atoms b+1 and b+2. The coupling
  // term J'_b (x_{b+2} - x_{b+1}) X_b has the form -F_b O_b (x_{b+2} - x_{b+1})
  // with O_b = X_b and F_b = -J'_b.
  sys.strengths = -chain.dJ;
  for (Eigen::Index b = 0; b + 1 < L; ++b) {
    Eigen::SparseMatrix<double> x(dim, dim);
    const int i = int(b + 1);
    std::vector<Eigen::Triplet<double>> t{{i, i + 1, 1.0}, {i + 1, i, 1.0}};
    x.setFromTriplets(t.begin(), t.end());
    sys.bonds.push_back(BondOperator::general(std::move(x)));
  }
  sys.coupling = compute_coupling(sys.es, sys.bonds, sys.strengths,
                                  default_thresholds(sys.es.energies, sys.strengths));
  sys.modes = disentangle(sys.coupling);
  return sys;
}

double concurrence(const Eigen::Matrix4cd& rho) {
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw NumericalError("concurrence of a non-Hermitian matrix");
  if (std::abs(rho.trace() - 1.0) > 1e-8) throw NumericalError("concurrence needs unit trace");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> check(rho, Eigen::EigenvaluesOnly);
  if (check.eigenvalues().minCoeff() < -1e-8)
    throw NumericalError("concurrence of a state with negative eigenvalues");
  Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
  yy(0, 3) = yy(3, 0) = -1.0;
  yy(1, 2) = yy(2, 1) = 1.0;
  const Eigen::Matrix4cd tilde = yy * rho.conjugate() * yy;
  // Eigenvalues of rho tilde are those of sqrt(rho) tilde sqrt(rho), which is
  // Hermitian and PSD; this avoids a non-Hermitian eigensolve.
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> r(rho);
  const Eigen::Matrix4cd root = r.eigenvectors() *
                                r.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<cdouble>().asDiagonal() *
                                r.eigenvectors().adjoint();
  const Eigen::Matrix4cd m = root * tilde * root;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> s(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  Eigen::Vector4d l = s.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  std::sort(l.data(), l.data() + 4, std::greater<>());
  return std::clamp(l[0] - l[1] - l[2] - l[3], 0.0, 1.0);
}

Eigen::Matrix4cd reduce_aux_end(const Eigen::MatrixXcd& rho) {
  const Eigen::Index L = rho.rows() - 1;
  Eigen::Matrix4cd out = Eigen::Matrix4cd::Zero();
  for (Eigen::Index j = 1; j < L; ++j) out(0, 0) += rho(j, j);
  out(1, 1) = rho(L, L);
  out(2, 2) = rho(0, 0);
  out(1, 2) = rho(L, 0);
  out(2, 1) = rho(0, L);
  return out;
}

std::vector<double> transport_concurrence(const TransportSystem& sys,
                                          const std::vector<double>& times, bool dephasing,
                                          bool full) {
  const Eigen::Index dim = sys.L + 1;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[0] = psi[1] = std::sqrt(0.5);
  const DensityMatrix rho0 = pure_state(psi);
  const Eigen::MatrixXcd v = sys.es.vectors.cast<cdouble>();
  std::vector<double> out;
  for (double t : times) {
    const DensityMatrix fga = evolve_fga(rho0, sys.es, t);
    if (full) {
      const Eigen::MatrixXcd gamma =
          dephasing ? build_channel(sys.modes, t).gamma : Eigen::MatrixXcd::Ones(dim, dim);
      const DensityMatrix sites = to_computational(apply_channel(fga, gamma), sys.es.vectors);
      out.push_back(concurrence(reduce_aux_end(sites.matrix)));
    } else {
      const Eigen::Index a = sys.aux_state;
      const Eigen::VectorXcd col = dephasing ? channel_column(sys.modes, a, t)
                                             : Eigen::VectorXcd::Ones(dim);
      // rho'_{L,0} = sum_n V_{L n} Gamma_{a n} rho_{n a}, with |aux> = e_0.
      const cdouble c =
          (v.row(sys.L).transpose().cwiseProduct(col.conjugate()).cwiseProduct(fga.matrix.col(a))).sum();
      out.push_back(std::min(1.0, 2.0 * std::abs(c)));
    }
  }
  return out;
}

TransportPeak peak_concurrence(const TransportSystem& sys, double t_pi, bool dephasing) {
  constexpr int samples = 48;
  std::vector<double> times;
  for (int i = 1; i <= samples; ++i) times.push_back(1.5 * t_pi * i / samples);
  const auto c = transport_concurrence(sys, times, dephasing);
  const auto best = std::size_t(std::max_element(c.begin(), c.end()) - c.begin());
  double lo = best == 0 ? 0.0 : times[best - 1];
  double hi = best + 1 < times.size() ? times[best + 1] : times.back();
  const auto value = [&](double t) { return transport_concurrence(sys, {t}, dephasing)[0]; };
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = value(a), fb = value(b);
  for (int it = 0; it < 40 && hi - lo > 1e-10 * t_pi; ++it) {
    if (fa > fb) {
      hi = b, b = a, fb = fa;
      a = hi - g * (hi - lo), fa = value(a);
    } else {
      lo = a, a = b, fa = fb;
      b = lo + g * (hi - lo), fb = value(b);
    }
  }
  TransportPeak p{c[best], times[best]};
  const double t = 0.5 * (lo + hi);
  const double ft = value(t);
  if (ft > p.concurrence) p = {ft, t};
  return p;
}

std::vector<CrossoverPoint> crossover_scan(const TransportPhysics& physics,
                                           const std::vector<double>& trap_frequencies,
                                           const std::vector<Eigen::Index>& lengths,
                                           bool dephasing, int threads) {
  if (trap_frequencies.empty() || lengths.empty()) throw UsageError("crossover scan needs grids");
  std::vector<CrossoverPoint> out(trap_frequencies.size());
  for (auto L : lengths)
    if (L < 2 || L > kMaxTransportLength)
      throw CapacityError("transport chains need 2 <= L <= " + std::to_string(kMaxTransportLength));
  parallel_for(out.size(), threads, [&](std::size_t i) {
    CrossoverPoint& p = out[i];
    p.trap_frequency = trap_frequencies[i];
    p.sigma0 = trap_width(p.trap_frequency, physics.atom_mass);
    for (auto L : lengths) {
      const EffectiveChain chain = pst_chain(physics, p.trap_frequency, L);
      const TransportSystem sys = build_transport_system(chain);
      p.peaks.push_back(peak_concurrence(sys, pst_transfer_time(chain), dephasing));
    }
    for (std::size_t k = 0; k < lengths.size(); ++k)
      if (p.peaks[k].concurrence >= 0.5) p.L_max = std::max(p.L_max, lengths[k]);
    p.L_interpolated = double(p.L_max);
    for (std::size_t k = 0; k + 1 < lengths.size(); ++k) {
      const double c0 = p.peaks[k].concurrence, c1 = p.peaks[k + 1].concurrence;
      if (c0 >= 0.5 && c1 < 0.5) {
        const double s = (c0 - 0.5) / (c0 - c1);
        p.L_interpolated = double(lengths[k]) + s * double(lengths[k + 1] - lengths[k]);
      }
    }
  });
  return out;
}

QuadraticFit fit_quadratic(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 3) throw UsageError("quadratic fit needs >= 3 points");
  const Eigen::Index n = Eigen::Index(x.size());
  Eigen::MatrixXd A(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A.row(i) << x[i] * x[i], x[i], 1.0;
    rhs[i] = y[i];
  }
  const Eigen::Vector3d coef = A.colPivHouseholderQr().solve(rhs);
  QuadraticFit f{coef[0], coef[1], coef[2]};
  if (f.a != 0.0) f.vertex = -f.b / (2.0 * f.a);
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  f.interior = f.a < 0.0 && f.vertex > *lo && f.vertex < *hi;
  return f;
}

}  // namespace rydchan
