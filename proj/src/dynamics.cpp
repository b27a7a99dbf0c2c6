#include "rydchan/dynamics.hpp"

#include <algorithm>
#include <numeric>

#include "rydchan/errors.hpp"

namespace rydchan {

DensityMatrix pure_state(const Eigen::VectorXcd& psi, Basis basis) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw UsageError("pure state needs a nonzero vector");
  const Eigen::VectorXcd v = psi / n;
  return {v * v.adjoint(), basis};
}

void check_density(const DensityMatrix& rho, double tol, double psd_tol) {
  const auto& m = rho.matrix;
  if (m.rows() != m.cols()) throw NumericalError("density matrix is not square");
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw NumericalError("density matrix is not Hermitian");
  if (std::abs(m.trace() - 1.0) > tol) throw NumericalError("density matrix trace differs from 1");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(m, Eigen::EigenvaluesOnly);
  if (s.eigenvalues().minCoeff() < -psd_tol)
    throw NumericalError("density matrix has a negative eigenvalue");
}

DensityMatrix to_eigen(const DensityMatrix& rho, const Eigen::MatrixXd& vectors) {
  if (rho.basis == Basis::eigen) return rho;
  const Eigen::MatrixXcd v = vectors.cast<cdouble>();
  return {v.adjoint() * rho.matrix * v, Basis::eigen};
}

DensityMatrix to_computational(const DensityMatrix& rho, const Eigen::MatrixXd& vectors) {
  if (rho.basis == Basis::computational) return rho;
  const Eigen::MatrixXcd v = vectors.cast<cdouble>();
  return {v * rho.matrix * v.adjoint(), Basis::computational};
}

DensityMatrix evolve_fga(const DensityMatrix& rho0, const EigenSystem<double>& es, double t) {
  if (t < 0.0) throw DomainError("evolve_fga needs t >= 0");
  if (rho0.dim() != es.dim()) throw UsageError("density matrix and eigensystem differ in size");
  DensityMatrix rho = to_eigen(rho0, es.vectors);
  const Eigen::VectorXcd phase =
      (es.energies.cast<cdouble>() * cdouble(0.0, -t)).array().exp().matrix();
  rho.matrix = phase.asDiagonal() * rho.matrix * phase.conjugate().asDiagonal();
  return rho;
}

DensityMatrix apply_channel(const DensityMatrix& rho_fga, const Eigen::MatrixXcd& gamma) {
  if (rho_fga.basis != Basis::eigen) throw UsageError("apply_channel needs an eigenbasis state");
  if (gamma.rows() != rho_fga.dim() || gamma.cols() != rho_fga.dim())
    throw UsageError("channel and density matrix differ in size");
  // Tracing out motion leaves rho_nm <psi_m|psi_n> = rho_nm Gamma_mn.
  return {gamma.transpose().cwiseProduct(rho_fga.matrix), Basis::eigen};
}

double trace_fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.basis != b.basis) throw UsageError("trace fidelity of states in different bases");
  if (a.dim() != b.dim()) throw UsageError("trace fidelity of states of different size");
  return a.matrix.cwiseProduct(b.matrix.transpose()).sum().real();
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.basis != b.basis) throw UsageError("trace distance of states in different bases");
  if (a.dim() != b.dim()) throw UsageError("trace distance of states of different size");
  const Eigen::MatrixXcd d = a.matrix - b.matrix;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(0.5 * (d + d.adjoint()),
                                                    Eigen::EigenvaluesOnly);
  return 0.5 * s.eigenvalues().cwiseAbs().sum();
}

double breakdown_time_vdw(double r0, double v0, double mass, double gap, double element) {
  if (element == 0.0) return std::numeric_limits<double>::infinity();
  return r0 / (3.0 * v0) * std::sqrt(0.5 * mass * std::abs(gap / element));
}

double breakdown_time_root(double force, double mass, double gap, double element) {
  if (element == 0.0 || force == 0.0) return std::numeric_limits<double>::infinity();
  const auto excess = [&](double T) {
    return force * force * T * T * std::abs(element) / (2.0 * mass) - std::abs(gap);
  };
  double lo = 0.0, hi = 1.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

BreakdownEstimate breakdown_time(const EigenSystem<double>& es, const NormalizedChain& chain) {
  if (chain.L != 2 || es.dim() != 4) throw UsageError("breakdown time is defined for two atoms");
  const Eigen::Index rr = 3;
  BreakdownEstimate out;
  es.vectors.row(rr).cwiseAbs().maxCoeff(&out.rr_state);
  const Eigen::MatrixXd p = pair_elements(es, 2).front();
  for (Eigen::Index n = 0; n < 4; ++n) {
    if (n == out.rr_state) continue;
    BreakdownBranch b;
    b.state = n;
    b.gap = std::abs(es.energies[out.rr_state] - es.energies[n]);
    b.element = std::abs(p(n, out.rr_state));
    if (b.element > 1e-14) {
      b.time = chain.alpha == 6
                   ? breakdown_time_vdw(chain.spacings[0], chain.v0[0], 1.0, b.gap, b.element)
                   : breakdown_time_root(chain.force[0], 1.0, b.gap, b.element);
    }
    out.t_star = std::min(out.t_star, b.time);
    out.branches.push_back(b);
  }
  return out;
}

double spin_exchange_rate(double omega, double delta, double v0) {
  if (delta == 0.0 || delta == v0) throw DomainError("exchange rate has a pole at Delta = 0 or V");
  return omega * omega * v0 / (4.0 * delta * (delta - v0));
}

double spin_exchange_rate_dv(double omega, double delta, double v0) {
  if (delta == 0.0 || delta == v0) throw DomainError("exchange rate has a pole at Delta = 0 or V");
  return omega * omega / (4.0 * (delta - v0) * (delta - v0));
}

ExchangeCycles exchange_cycle_metrics(const std::vector<double>& times,
                                      const std::vector<double>& values, double threshold,
                                      double min_separation, double min_value) {
  if (times.size() != values.size()) throw UsageError("times and values differ in length");
  struct Peak {
    double t, v;
  };
  std::vector<Peak> candidates;
  for (std::size_t i = 1; i + 1 < values.size(); ++i) {
    if (values[i] < values[i - 1] || values[i] < values[i + 1]) continue;
    if (values[i] == values[i - 1] && values[i] == values[i + 1]) continue;
    // Parabola through the three samples (uneven spacing allowed).
    const double t0 = times[i - 1], t1 = times[i], t2 = times[i + 1];
    const double y0 = values[i - 1], y1 = values[i], y2 = values[i + 1];
    const double d0 = (y1 - y0) / (t1 - t0), d1 = (y2 - y1) / (t2 - t1);
    const double a = (d1 - d0) / (t2 - t0);
    Peak p{t1, y1};
    if (a < 0.0) {
      const double b = d0 - a * (t0 + t1);
      p.t = std::clamp(-b / (2.0 * a), t0, t2);
      p.v = y1 + (p.t - t1) * (b + a * (p.t + t1));
    }
    if (p.v >= min_value) candidates.push_back(p);
  }
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return candidates[a].v > candidates[b].v; });
  std::vector<Peak> kept;
  for (auto i : order) {
    const auto& c = candidates[i];
    const bool close = std::any_of(kept.begin(), kept.end(), [&](const Peak& k) {
      return std::abs(k.t - c.t) < min_separation;
    });
    if (!close && (times.empty() || c.t - times.front() >= min_separation)) kept.push_back(c);
  }
  std::sort(kept.begin(), kept.end(), [](const Peak& a, const Peak& b) { return a.t < b.t; });
  ExchangeCycles out;
  for (const auto& k : kept) {
    out.peak_times.push_back(k.t);
    out.peak_values.push_back(k.v);
  }
  while (out.cycles < int(kept.size()) && kept[out.cycles].v >= threshold) ++out.cycles;
  return out;
}

std::string to_string(BranchLabel label) {
  switch (label) {
    case BranchLabel::gg: return "gg";
    case BranchLabel::s: return "s";
    case BranchLabel::rr: return "rr";
    case BranchLabel::a: return "a";
  }
  return "?";
}

std::vector<BranchLabel> branch_labels(const EigenSystem<double>& es) {
  if (es.dim() != 4) throw UsageError("branch labels are defined for two atoms");
  const double h = std::sqrt(0.5);
  Eigen::Matrix4d ref;  // columns gg, s, rr, a in the {gg, gr, rg, rr} basis
  ref << 1, 0, 0, 0,
         0, h, 0, -h,
         0, h, 0, h,
         0, 0, 1, 0;
  const Eigen::MatrixXd overlap = (ref.transpose() * es.vectors).cwiseAbs2();
  std::vector<BranchLabel> labels;
  for (Eigen::Index n = 0; n < 4; ++n) {
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < 4; ++k)
      if (overlap(k, n) > overlap(best, n) * (1.0 + 1e-12)) best = k;
    labels.push_back(BranchLabel(best));
  }
  return labels;
}

}  // namespace rydchan
