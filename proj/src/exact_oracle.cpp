#include "rydchan/exact_oracle.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <map>
#include <memory>

#include "rydchan/errors.hpp"
#include "rydchan/spin_model.hpp"

namespace rydchan {

namespace {

constexpr int kSpin = 4;
constexpr int kRR = 3;

bool power_of_two(Eigen::Index n) { return n > 1 && (n & (n - 1)) == 0; }

void check_grid(const RelativeGrid& g) {
  if (!power_of_two(g.points)) throw UsageError("grid size must be a power of two");
  if (!(g.extent > 0.0)) throw UsageError("grid extent must be positive");
}

// Edge taper: 1 inside, cos^(1/8) falling to 0 over the outer fifth.
double taper(double a, double limit) {
  const double start = 0.8 * limit;
  if (std::abs(a) <= start) return 1.0;
  const double s = std::min(1.0, (std::abs(a) - start) / (limit - start));
  return std::pow(std::cos(0.5 * constants::pi * s), 0.125);
}

// Transforms every spin column of psi in place.
void transform(Eigen::FFT<double>& fft, Eigen::MatrixXcd& psi, bool forward) {
  Eigen::VectorXcd in, out;
  for (int s = 0; s < kSpin; ++s) {
    in = psi.col(s);
    if (forward)
      fft.fwd(out, in);
    else
      fft.inv(out, in);
    psi.col(s) = out;
  }
}

}  // namespace

Eigen::VectorXd RelativeGrid::x() const {
  return Eigen::VectorXd::LinSpaced(points, -extent, extent - dx());
}

Eigen::VectorXd RelativeGrid::k() const {
  Eigen::VectorXd k(points);
  const double dk = 2.0 * constants::pi / (double(points) * dx());
  for (Eigen::Index j = 0; j < points; ++j)
    k[j] = dk * double(j < points / 2 ? j : j - points);
  return k;
}

RelativeGrid grid_for(double force, double t_max, double min_extent) {
  const double f = std::abs(force);
  const double extent = std::max(min_extent, 1.25 * (f * t_max * t_max + 10.0 * std::hypot(1.0, t_max)));
  const double k_needed = 1.25 * (f * t_max + 12.0);
  RelativeGrid g;
  g.extent = extent;
  g.points = 64;
  while (g.k_max() < k_needed) g.points *= 2;
  return g;
}

double SpinMotionState::norm(double dx) const { return psi.squaredNorm() * dx; }

Eigen::Matrix4cd SpinMotionState::reduced(double dx) const {
  Eigen::Matrix4cd rho = (psi.transpose() * psi.conjugate()) * dx;
  rho.diagonal() += absorbed.cast<cdouble>();
  return rho;
}

SpinMotionState initial_state(const RelativeGrid& grid, const Eigen::Vector4cd& spin) {
  check_grid(grid);
  const Eigen::VectorXd x = grid.x();
  const Eigen::VectorXd g =
      (std::pow(2.0 * constants::pi, -0.25) * (-0.25 * x.array().square()).exp()).matrix();
  SpinMotionState s;
  s.psi = g.cast<cdouble>() * (spin / spin.norm()).transpose();
  return s;
}

double mean_separation(const SpinMotionState& state, const RelativeGrid& grid) {
  const Eigen::VectorXd p = state.psi.col(kRR).cwiseAbs2();
  const double w = p.sum() * grid.dx();
  if (w < 1e-12) throw NumericalError("|rr> branch is empty; its mean separation is undefined");
  return grid.x().dot(p) * grid.dx() / w;
}

double branch_width(const SpinMotionState& state, const RelativeGrid& grid, int branch) {
  const Eigen::VectorXd p = state.psi.col(branch).cwiseAbs2();
  const Eigen::VectorXd x = grid.x();
  const double w = p.sum();
  if (!(w > 0.0)) throw NumericalError("branch is empty");
  const double mean = x.dot(p) / w;
  return std::sqrt((x.array() - mean).square().matrix().dot(p) / w);
}

double default_step(const NormalizedChain& chain, const RelativeGrid& grid) {
  const double f = chain.force.size() ? std::abs(chain.force[0]) : 0.0;
  return std::min(1e-2, 0.05 / std::sqrt(1.0 + f * grid.k_max()));
}

SplitOperator::SplitOperator(const NormalizedChain& chain, const RelativeGrid& grid, double dt,
                             bool nonlinear, bool absorb)
    : grid_(grid), dt_(dt), absorb_(absorb) {
  check_grid(grid);
  if (chain.L != 2) throw CapacityError("the exact oracle handles two atoms only");
  if (!(dt > 0.0)) throw UsageError("time step must be positive");
  const Eigen::Matrix4d hs = build_hamiltonian(chain).matrix;
  const Eigen::VectorXd x = grid.x();
  const double r0 = chain.spacings[0];
  const double v0 = chain.v0[0];
  const double f = chain.force[0];
  half_potential_.resize(grid.points);
  local_h_.resize(grid.points);
  for (Eigen::Index j = 0; j < grid.points; ++j) {
    Eigen::Matrix4d h = hs;
    if (nonlinear) {
      // Full power law, clamped where the atoms would pass half the spacing.
      const double r = std::max(r0 + x[j], 0.5 * r0);
      h(kRR, kRR) += v0 * (std::pow(r0 / r, double(chain.alpha)) - 1.0);
    } else {
      h(kRR, kRR) -= f * x[j];
    }
    local_h_[j] = h;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(h);
    const Eigen::Vector4cd phase =
        (es.eigenvalues().cast<cdouble>() * cdouble(0.0, -0.5 * dt)).array().exp().matrix();
    const Eigen::Matrix4cd u = es.eigenvectors().cast<cdouble>();
    half_potential_[j] = u * phase.asDiagonal() * u.transpose();
  }
  k_ = grid.k();
  kinetic_phase_ = (k_.array().square().cast<cdouble>() * cdouble(0.0, -dt)).exp().matrix();
  x_mask_.resize(grid.points);
  k_mask_.resize(grid.points);
  for (Eigen::Index j = 0; j < grid.points; ++j) {
    x_mask_[j] = taper(x[j], grid.extent);
    k_mask_[j] = taper(k_[j], grid.k_max());
  }
}

void SplitOperator::step(SpinMotionState& state) const {
  thread_local Eigen::FFT<double> fft;
  auto& psi = state.psi;
  const double dx = grid_.dx();
  const auto potential = [&] {
    for (Eigen::Index j = 0; j < grid_.points; ++j) {
      const Eigen::Vector4cd v = psi.row(j).transpose();
      psi.row(j) = (half_potential_[j] * v).transpose();
    }
  };
  potential();
  transform(fft, psi, true);
  psi = kinetic_phase_.asDiagonal() * psi;
  if (absorb_) {
    const Eigen::Vector4d before = psi.colwise().squaredNorm().transpose();
    psi = k_mask_.asDiagonal() * psi;
    const Eigen::Vector4d after = psi.colwise().squaredNorm().transpose();
    state.absorbed += (before - after) * dx / double(grid_.points);
  }
  transform(fft, psi, false);
  potential();
  if (absorb_) {
    const Eigen::Vector4d before = psi.colwise().squaredNorm().transpose();
    psi = x_mask_.asDiagonal() * psi;
    const Eigen::Vector4d after = psi.colwise().squaredNorm().transpose();
    state.absorbed += (before - after) * dx;
  }
}

double SplitOperator::energy(const SpinMotionState& state) const {
  thread_local Eigen::FFT<double> fft;
  const double dx = grid_.dx();
  double e = 0.0;
  for (Eigen::Index j = 0; j < grid_.points; ++j) {
    const Eigen::Vector4cd v = state.psi.row(j).transpose();
    e += (v.adjoint() * local_h_[j].cast<cdouble>() * v)(0, 0).real();
  }
  e *= dx;
  Eigen::MatrixXcd pk = state.psi;
  transform(fft, pk, true);
  e += k_.array().square().matrix().dot(pk.rowwise().squaredNorm()) * dx / double(grid_.points);
  return e;
}

namespace {

void check_boundary(const SpinMotionState& s, const RelativeGrid& grid, double tol) {
  const Eigen::Index edge = std::max<Eigen::Index>(1, grid.points / 40);
  const double dx = grid.dx();
  const double near_edge = (s.psi.topRows(edge).squaredNorm() + s.psi.bottomRows(edge).squaredNorm()) * dx;
  if (near_edge > tol)
    throw GridError("wavefunction density " + std::to_string(near_edge) +
                        " reached the edge of the relative-coordinate grid",
                    2.0 * grid.extent);
  thread_local Eigen::FFT<double> fft;
  Eigen::MatrixXcd pk = s.psi;
  transform(fft, pk, true);
  const Eigen::Index n = grid.points;
  const double high = pk.middleRows(n / 2 - edge, 2 * edge).squaredNorm() * dx / double(n);
  if (high > tol)
    throw GridError("wavefunction reached the momentum cutoff of the grid (" +
                        std::to_string(high) + ")",
                    grid.extent);
}

// Steps needed for each output interval and the common substep.
struct Schedule {
  std::vector<long> steps;
  double h = 0.0;
};

Schedule schedule(const std::vector<double>& times, double dt) {
  if (times.empty() || times.front() != 0.0) throw UsageError("time grid must start at 0");
  Schedule s;
  double largest = 0.0;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw UsageError("time grid must be strictly increasing");
    largest = std::max(largest, times[i] - times[i - 1]);
  }
  // One substep for all intervals keeps a single precomputed propagator;
  // intervals that are not multiples of it get a final shorter step.
  s.h = largest > 0.0 ? largest / std::ceil(largest / dt) : dt;
  for (std::size_t i = 1; i < times.size(); ++i)
    s.steps.push_back(long(std::floor((times[i] - times[i - 1]) / s.h + 1e-9)));
  return s;
}

std::vector<SpinMotionState> run(const NormalizedChain& chain, const Eigen::Vector4cd& psi0,
                                 const std::vector<double>& times, const ExactOptions& o,
                                 double dt) {
  const Schedule sch = schedule(times, dt);
  const SplitOperator op(chain, o.grid, sch.h, o.nonlinear, o.absorb);
  std::map<double, std::unique_ptr<SplitOperator>> remainders;
  SpinMotionState s = initial_state(o.grid, psi0);
  std::vector<SpinMotionState> out{s};
  for (std::size_t i = 1; i < times.size(); ++i) {
    const long n = sch.steps[i - 1];
    for (long k = 0; k < n; ++k) op.step(s);
    const double rest = (times[i] - times[i - 1]) - double(n) * sch.h;
    if (rest > 1e-12 * sch.h) {
      auto& r = remainders[rest];
      if (!r) r = std::make_unique<SplitOperator>(chain, o.grid, rest, o.nonlinear, o.absorb);
      r->step(s);
    }
    if (!o.absorb) check_boundary(s, o.grid, o.boundary_tol);
    out.push_back(s);
  }
  return out;
}

ExactResult evolve_mixed(const NormalizedChain& chain, const Eigen::Matrix4cd& rho0,
                         const std::vector<double>& times, const ExactOptions& o, double dt) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(0.5 * (rho0 + rho0.adjoint()));
  ExactResult r;
  r.times = times;
  r.rho.assign(times.size(), Eigen::Matrix4cd::Zero());
  r.norm.assign(times.size(), 0.0);
  const double dx = o.grid.dx();
  for (int i = 0; i < kSpin; ++i) {
    const double p = es.eigenvalues()[i];
    if (p < 1e-14) continue;
    const auto states = run(chain, es.eigenvectors().col(i), times, o, dt);
    for (std::size_t t = 0; t < times.size(); ++t) {
      r.rho[t] += p * states[t].reduced(dx);
      r.norm[t] += p * states[t].norm(dx);
    }
  }
  r.step = dt;
  return r;
}

}  // namespace

ExactResult evolve_exact(const NormalizedChain& chain, const Eigen::Matrix4cd& rho0,
                         const std::vector<double>& times, const ExactOptions& options) {
  const double dt = options.dt > 0.0 ? options.dt : default_step(chain, options.grid);
  ExactResult r = evolve_mixed(chain, rho0, times, options, dt);
  if (options.richardson) {
    const ExactResult fine = evolve_mixed(chain, rho0, times, options, 0.5 * dt);
    for (std::size_t t = 0; t < times.size(); ++t)
      r.richardson_change =
          std::max(r.richardson_change, (fine.rho[t] - r.rho[t]).cwiseAbs().maxCoeff());
    if (r.richardson_change > options.richardson_tol)
      throw StepError("halving the time step changed the reduced state by " +
                      std::to_string(r.richardson_change));
  }
  return r;
}

std::vector<SpinMotionState> evolve_exact_states(const NormalizedChain& chain,
                                                 const Eigen::Vector4cd& psi0,
                                                 const std::vector<double>& times,
                                                 const ExactOptions& options) {
  const double dt = options.dt > 0.0 ? options.dt : default_step(chain, options.grid);
  return run(chain, psi0, times, options, dt);
}

}  // namespace rydchan
