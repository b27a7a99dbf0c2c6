#include "rydchan/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "rydchan/csv.hpp"
#include "rydchan/errors.hpp"
#include "rydchan/parallel.hpp"
#include "rydchan/transport.hpp"

namespace rydchan {

ChainSystem prepare_system(const PhysicalParams& p) {
  ChainSystem s;
  s.chain = normalize(p);
  s.es = diagonalize(build_hamiltonian(s.chain));
  const auto bonds = pair_projectors(s.chain.L);
  const CouplingData coupling = compute_coupling(
      s.es, bonds, s.chain.force, default_thresholds(s.es.energies, s.chain.force));
  s.modes = disentangle(coupling);
  return s;
}

PhysicalParams with_detuning_ratio(PhysicalParams p, double ratio) {
  const double r = p.trap_centers[1] - p.trap_centers[0];
  const double v = power_law_interaction(p.interaction_coefficient, p.interaction_exponent, r) /
                   constants::hbar;
  p.detuning = Eigen::VectorXd::Constant(p.size(), ratio * v);
  return p;
}

PhysicalParams with_spacing(PhysicalParams p, double spacing) {
  p.trap_centers = Eigen::VectorXd::LinSpaced(p.size(), 0.0, spacing * double(p.size() - 1));
  return p;
}

PhysicalParams random_params(std::mt19937_64& rng, Eigen::Index L) {
  std::uniform_real_distribution<double> spacing(2.4e-6, 4.0e-6), nu(2e4, 2e5),
      rabi(1e6, 1e7), detuning(-2e7, 2e7);
  const double two_pi = 2.0 * constants::pi;
  PhysicalParams p;
  p.atom_mass = 86.909;
  p.trap_frequency = nu(rng);
  p.trap_centers.resize(L);
  p.trap_centers[0] = 0.0;
  for (Eigen::Index l = 1; l < L; ++l) p.trap_centers[l] = p.trap_centers[l - 1] + spacing(rng);
  p.rabi.resize(L);
  p.detuning.resize(L);
  for (Eigen::Index l = 0; l < L; ++l) {
    p.rabi[l] = two_pi * rabi(rng);
    p.detuning[l] = two_pi * detuning(rng);
  }
  p.interaction_coefficient = kIllustrativeC6;
  p.interaction_exponent = 6;
  return p;
}

std::vector<DensityMatrix> channel_trajectory(const ChainSystem& sys, const DensityMatrix& rho0,
                                              const std::vector<double>& times, bool dephasing) {
  std::vector<DensityMatrix> out;
  out.reserve(times.size());
  for (double t : times) {
    DensityMatrix fga = evolve_fga(rho0, sys.es, t);
    out.push_back(dephasing ? apply_channel(fga, build_channel(sys.modes, t).gamma) : fga);
  }
  return out;
}

namespace {

DensityMatrix basis_state(Eigen::Index index, Eigen::Index dim) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(dim);
  psi[index] = 1.0;
  return pure_state(psi);
}

double population(const DensityMatrix& rho, const Eigen::MatrixXd& vectors, Eigen::Index index) {
  if (rho.basis == Basis::computational) return rho.matrix(index, index).real();
  const Eigen::VectorXd row = vectors.row(index).transpose();
  return (row.cast<cdouble>().transpose() * rho.matrix * row.cast<cdouble>()).value().real();
}

double exchange_period(const NormalizedChain& c) {
  return constants::pi / std::abs(spin_exchange_rate(c.omega[0], c.delta[0], c.v0[0]));
}

// Linear interpolation of the first downward crossing of `level`.
double first_crossing(const std::vector<double>& t, const std::vector<double>& y, double level) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] >= level) continue;
    if (i == 0) return t[0];
    const double w = (y[i - 1] - level) / (y[i - 1] - y[i]);
    return t[i - 1] + w * (t[i] - t[i - 1]);
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

ExchangeCycleCount count_exchange_cycles(const ChainSystem& sys, Eigen::Index initial,
                                         const std::vector<double>& thresholds, bool dephasing,
                                         int samples_per_period, int max_periods) {
  if (sys.chain.L != 2) throw UsageError("exchange cycles are defined for two atoms");
  if (samples_per_period < 8 || max_periods < 1) throw UsageError("cycle sampling too coarse");
  ExchangeCycleCount out;
  out.period = exchange_period(sys.chain);
  const DensityMatrix rho0 = basis_state(initial, 4);
  const double lowest =
      thresholds.empty() ? 0.0 : *std::min_element(thresholds.begin(), thresholds.end());

  std::vector<double> times, pop, fid;
  const long total = long(samples_per_period) * max_periods;
  long stop = total;
  for (long k = 0; k <= std::min(stop, total); ++k) {
    const double t = out.period * double(k) / samples_per_period;
    const DensityMatrix fga = evolve_fga(rho0, sys.es, t);
    const DensityMatrix rho =
        dephasing ? apply_channel(fga, build_channel(sys.modes, t).gamma) : fga;
    times.push_back(t);
    pop.push_back(population(rho, sys.es.vectors, initial));
    fid.push_back(trace_fidelity(rho, fga));
    // One more period after the last crossing keeps the final return visible.
    if (stop == total && fid.back() < lowest) stop = k + samples_per_period;
  }

  const ExchangeCycles all = exchange_cycle_metrics(times, pop, 0.0, 0.5 * out.period);
  out.return_times = all.peak_times;
  out.return_values = all.peak_values;
  for (double th : thresholds) {
    CycleThresholdCount c;
    c.threshold = th;
    c.crossing_time = first_crossing(times, fid, th);
    c.periods = c.crossing_time / out.period;
    c.cycles = int(std::count_if(out.return_times.begin(), out.return_times.end(),
                                 [&](double t) { return t <= c.crossing_time; }));
    c.cycles_return_probability =
        exchange_cycle_metrics(times, pop, th, 0.5 * out.period).cycles;
    out.counts.push_back(c);
  }
  return out;
}

ExactOptions experiment_exact_options(Eigen::Index points, double extent, double dt) {
  ExactOptions o;
  o.grid.points = points;
  o.grid.extent = extent;
  o.absorb = true;
  o.dt = dt;
  return o;
}

InfidelityMetric channel_infidelity_metric(const ChainSystem& sys, Eigen::Index initial,
                                           double threshold, const ExactOptions& options) {
  const DensityMatrix rho0 = basis_state(initial, sys.es.dim());
  const auto channel_fidelity = [&](double t) {
    const DensityMatrix fga = evolve_fga(rho0, sys.es, t);
    return trace_fidelity(apply_channel(fga, build_channel(sys.modes, t).gamma), fga);
  };
  // Geometric scan of the channel for a first window.
  double window = 0.0;
  for (double t = 1e-4; t < 1e4; t *= 1.25) {
    if (channel_fidelity(t) < threshold) {
      window = 1.5 * t;
      break;
    }
  }
  if (window == 0.0) throw NumericalError("channel fidelity never reaches the threshold");

  constexpr int samples = 300;
  for (int attempt = 0; attempt < 8; ++attempt, window *= 2.0) {
    std::vector<double> times(samples + 1);
    for (int k = 0; k <= samples; ++k) times[k] = window * k / samples;
    ExactOptions o = options;
    if (o.dt <= 0.0)
      o.dt = std::min(default_step(sys.chain, o.grid), window / (4.0 * samples));
    const ExactResult ex = evolve_exact(sys.chain, rho0.matrix, times, o);
    double prev_f = 1.0, prev_d = 0.0;
    for (int k = 0; k <= samples; ++k) {
      const double t = times[k];
      const DensityMatrix fga = evolve_fga(rho0, sys.es, t);
      const DensityMatrix exact = to_eigen({ex.rho[k], Basis::computational}, sys.es.vectors);
      const double f = trace_fidelity(exact, fga);
      const double d =
          trace_distance(apply_channel(fga, build_channel(sys.modes, t).gamma), exact);
      if (f <= threshold && k > 0) {
        const double w = (prev_f - threshold) / (prev_f - f);
        InfidelityMetric m;
        m.time = times[k - 1] + w * (t - times[k - 1]);
        m.trace_distance = prev_d + w * (d - prev_d);
        m.log10_trace_distance = std::log10(m.trace_distance);
        return m;
      }
      prev_f = f;
      prev_d = d;
    }
  }
  throw NumericalError("exact fidelity did not reach the threshold within the search window");
}

ExchangeFidelity exchange_fidelity(const ChainSystem& sys, Eigen::Index initial, bool dephasing,
                                   bool exact, const ExactOptions& options) {
  ExchangeFidelity f;
  f.time = exchange_period(sys.chain);
  const DensityMatrix rho0 = basis_state(initial, 4);
  const DensityMatrix fga = evolve_fga(rho0, sys.es, f.time);
  f.fga = population(fga, sys.es.vectors, initial);
  f.channel = dephasing
                  ? population(apply_channel(fga, build_channel(sys.modes, f.time).gamma),
                               sys.es.vectors, initial)
                  : f.fga;
  if (exact) {
    const ExactResult ex = evolve_exact(sys.chain, rho0.matrix, {0.0, f.time}, options);
    f.exact = ex.rho[1](initial, initial).real();
  }
  return f;
}

namespace {

std::filesystem::path numbered(const std::filesystem::path& dir, const std::string& stem,
                               std::size_t index) {
  std::string digits = std::to_string(index);
  if (digits.size() < 3) digits.insert(0, 3 - digits.size(), '0');
  return dir / (stem + "_" + digits + ".csv");
}

ExactOptions exact_options(const ExperimentSpec& spec) {
  return experiment_exact_options(spec.exact_points, spec.exact_extent, spec.exact_dt);
}

template <typename T>
std::string joined(const std::vector<T>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ';';
    if constexpr (std::is_same_v<T, double>)
      out += format_double(items[i]);
    else
      out += items[i];
  }
  return out;
}

}  // namespace

std::vector<std::filesystem::path> run_two_atom(const ExperimentSpec& spec) {
  struct Point {
    double spacing, nu;
  };
  const std::vector<double> spacings =
      spec.spacings.empty()
          ? std::vector<double>{spec.base.trap_centers[1] - spec.base.trap_centers[0]}
          : spec.spacings;
  const std::vector<double> nus = spec.trap_frequencies.empty()
                                      ? std::vector<double>{spec.base.trap_frequency}
                                      : spec.trap_frequencies;
  std::vector<Point> points;
  for (double s : spacings)
    for (double nu : nus) points.push_back({s, nu});

  const Eigen::Index initial = basis_index(spec.initial_state, 2);
  const Eigen::Index rg = basis_index("rg", 2);
  const std::vector<double> seconds = spec.time.times();

  struct Summary {
    double sigma0 = 0, t_star = 0, time_scale = 0, max_td_before = -1;
    ExchangeCycleCount cycles;
  };
  std::vector<Summary> summary(points.size());
  std::vector<std::filesystem::path> files(points.size());

  parallel_for(points.size(), spec.threads, [&](std::size_t i) {
    PhysicalParams p = with_spacing(spec.base, points[i].spacing);
    p.trap_frequency = points[i].nu;
    if (spec.set_detuning_ratio) p = with_detuning_ratio(p, spec.detuning_ratio);
    const ChainSystem sys = prepare_system(p);
    const NormalizedChain& c = sys.chain;
    const double t_star = breakdown_time(sys.es, c).t_star;

    std::vector<double> times;
    for (double s : seconds) times.push_back(c.from_seconds(s));
    const DensityMatrix rho0 = basis_state(initial, 4);
    const auto channel = channel_trajectory(sys, rho0, times, spec.dephasing);
    ExactResult ex;
    if (spec.exact) ex = evolve_exact(c, rho0.matrix, times, exact_options(spec));

    CsvTable table({"t_us", "fidelity_channel", "fidelity_exact", "overlap_rg_channel",
                    "overlap_rg_exact", "trace_distance_channel_exact", "T_star_us", "sigma0_m",
                    "time_scale_s", "energy_scale_J"});
    Summary& sm = summary[i];
    for (std::size_t k = 0; k < times.size(); ++k) {
      const DensityMatrix fga = evolve_fga(rho0, sys.es, times[k]);
      auto row = table.row();
      row << seconds[k] * 1e6 << trace_fidelity(channel[k], fga);
      if (spec.exact) {
        const DensityMatrix e = to_eigen({ex.rho[k], Basis::computational}, sys.es.vectors);
        const double td = trace_distance(channel[k], e);
        if (times[k] < t_star) sm.max_td_before = std::max(sm.max_td_before, td);
        row << trace_fidelity(e, fga) << population(channel[k], sys.es.vectors, rg)
            << ex.rho[k](rg, rg).real() << td;
      } else {
        row.blank() << population(channel[k], sys.es.vectors, rg);
        row.blank().blank();
      }
      row << c.to_seconds(t_star) * 1e6 << c.length_scale << c.time_scale << c.energy_scale;
    }
    files[i] = numbered(spec.out_dir, "two_atom", i);
    write_file_atomic(files[i], table.str());

    sm.sigma0 = c.length_scale;
    sm.t_star = c.to_seconds(t_star);
    sm.time_scale = c.time_scale;
    if (!spec.cycle_thresholds.empty())
      sm.cycles = count_exchange_cycles(sys, initial, spec.cycle_thresholds, spec.dephasing);
  });

  CsvTable index({"point", "file", "spacing_m", "nu_t_hz", "sigma0_m", "T_star_us",
                  "max_trace_distance_before_T_star", "time_scale_s"});
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto row = index.row();
    row << long(i) << files[i].filename().string() << points[i].spacing << points[i].nu
        << summary[i].sigma0 << summary[i].t_star * 1e6;
    if (spec.exact)
      row << summary[i].max_td_before;
    else
      row.blank();
    row << summary[i].time_scale;
  }
  std::vector<std::filesystem::path> out = files;
  out.push_back(spec.out_dir / "two_atom_points.csv");
  write_file_atomic(out.back(), index.str());

  if (!spec.cycle_thresholds.empty()) {
    CsvTable cycles({"point", "spacing_m", "nu_t_hz", "sigma0_m", "period_us", "threshold",
                     "cycles", "periods_to_threshold", "crossing_time_us",
                     "cycles_return_probability", "time_scale_s"});
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& s = summary[i];
      for (const auto& c : s.cycles.counts)
        cycles.row() << long(i) << points[i].spacing << points[i].nu << s.sigma0
                     << s.cycles.period * s.time_scale * 1e6 << c.threshold << c.cycles << c.periods
                     << c.crossing_time * s.time_scale * 1e6 << c.cycles_return_probability
                     << s.time_scale;
    }
    out.push_back(spec.out_dir / "exchange_cycles.csv");
    write_file_atomic(out.back(), cycles.str());
  }
  return out;
}

std::vector<std::filesystem::path> run_detuning_sweep(const ExperimentSpec& spec) {
  const Eigen::Index initial = basis_index(spec.initial_state, 2);
  const ExactOptions options = exact_options(spec);
  const std::size_t n = spec.detuning_ratios.size();
  struct Row {
    ExchangeFidelity fidelity;
    InfidelityMetric metric;
    std::vector<double> energies;
    std::vector<std::string> labels;
    double t_star = 0, sigma0 = 0, time_scale = 0, energy_scale = 0;
  };
  std::vector<Row> rows(n);
  parallel_for(n, spec.threads, [&](std::size_t i) {
    const ChainSystem sys = prepare_system(with_detuning_ratio(spec.base, spec.detuning_ratios[i]));
    Row& r = rows[i];
    r.fidelity = exchange_fidelity(sys, initial, spec.dephasing, spec.exact, options);
    if (spec.exact)
      r.metric = channel_infidelity_metric(sys, initial, spec.fidelity_loss_threshold, options);
    for (Eigen::Index k = 0; k < sys.es.dim(); ++k) r.energies.push_back(sys.es.energies[k]);
    for (auto l : branch_labels(sys.es)) r.labels.push_back(to_string(l));
    r.t_star = breakdown_time(sys.es, sys.chain).t_star;
    r.sigma0 = sys.chain.length_scale;
    r.time_scale = sys.chain.time_scale;
    r.energy_scale = sys.chain.energy_scale;
  });

  CsvTable table({"delta_over_v0", "exchange_time_us", "fidelity_fga", "fidelity_channel",
                  "fidelity_exact", "branch_energies", "branch_labels",
                  "channel_log_infidelity_at_80pct", "metric_time_us", "T_star_us", "sigma0_m",
                  "time_scale_s", "energy_scale_J"});
  for (std::size_t i = 0; i < n; ++i) {
    const Row& r = rows[i];
    auto row = table.row();
    row << spec.detuning_ratios[i] << r.fidelity.time * r.time_scale * 1e6 << r.fidelity.fga
        << r.fidelity.channel;
    if (spec.exact)
      row << r.fidelity.exact;
    else
      row.blank();
    row << joined(r.energies) << joined(r.labels);
    if (spec.exact)
      row << r.metric.log10_trace_distance << r.metric.time * r.time_scale * 1e6;
    else
      row.blank().blank();
    row << r.t_star * r.time_scale * 1e6 << r.sigma0 << r.time_scale << r.energy_scale;
  }
  const auto path = spec.out_dir / "detuning_sweep.csv";
  write_file_atomic(path, table.str());
  return {path};
}

std::vector<std::filesystem::path> run_transport(const ExperimentSpec& spec) {
  const auto scan =
      crossover_scan(spec.transport, spec.trap_frequencies, spec.lengths, spec.dephasing,
                     spec.threads);
  CsvTable table({"L", "nu_t", "sigma0_m", "peak_concurrence", "peak_time_us", "t_pi_us",
                  "crossover_flag", "time_scale_s"});
  for (const auto& p : scan) {
    const double time_scale = 1.0 / (2.0 * constants::pi * p.trap_frequency);
    for (std::size_t k = 0; k < spec.lengths.size(); ++k) {
      const Eigen::Index L = spec.lengths[k];
      const double t_pi = pst_transfer_time(pst_chain(spec.transport, p.trap_frequency, L));
      table.row() << long(L) << p.trap_frequency << p.sigma0 << p.peaks[k].concurrence
                  << p.peaks[k].time * time_scale * 1e6 << t_pi * time_scale * 1e6
                  << int(p.peaks[k].concurrence >= 0.5) << time_scale;
    }
  }
  const auto path = spec.out_dir / "transport.csv";
  write_file_atomic(path, table.str());
  return {path};
}

std::vector<std::filesystem::path> run_crossover(const ExperimentSpec& spec) {
  const auto scan =
      crossover_scan(spec.transport, spec.trap_frequencies, spec.lengths, spec.dephasing,
                     spec.threads);
  CsvTable table({"sigma0_m", "nu_t", "L_max", "L_interpolated", "time_scale_s"});
  std::vector<double> x, y;
  for (const auto& p : scan) {
    table.row() << p.sigma0 << p.trap_frequency << long(p.L_max) << p.L_interpolated
                << 1.0 / (2.0 * constants::pi * p.trap_frequency);
    x.push_back(p.sigma0 * 1e6);
    y.push_back(double(p.L_max));
  }
  std::vector<std::filesystem::path> out{spec.out_dir / "crossover.csv",
                                         spec.out_dir / "crossover_fit.csv"};
  write_file_atomic(out[0], table.str());

  CsvTable fit({"a_per_um2", "b_per_um", "c", "vertex_sigma0_m", "vertex_nu_t", "interior"});
  if (x.size() >= 3) {
    const QuadraticFit q = fit_quadratic(x, y);
    auto row = fit.row();
    row << q.a << q.b << q.c << q.vertex * 1e-6;
    if (q.vertex > 0.0)
      row << trap_frequency_for_width(q.vertex * 1e-6, spec.transport.atom_mass);
    else
      row.blank();
    row << int(q.interior);
  }
  write_file_atomic(out[1], fit.str());
  return out;
}

std::vector<CheckResult> run_check(int threads) {
  std::vector<CheckResult> out;
  std::ostringstream detail;

  // Channel validity on random chains.
  {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> time(0.0, 3.0);
    double diag = 0, herm = 0, trace = 0, initial = 0;
    double min_eig = std::numeric_limits<double>::infinity(), min_rho = min_eig;
    int draws = 0;
    bool ok = true;
    std::string failure;
    for (int i = 0; i < 50; ++i) {
      const Eigen::Index L = 2 + i % 4;
      try {
        const ChainSystem sys = prepare_system(random_params(rng, L));
        const double t = time(rng);
        const Eigen::MatrixXcd g0 = build_channel(sys.modes, 0.0, threads).gamma;
        initial = std::max(initial, (g0.array() - 1.0).abs().maxCoeff());
        const Eigen::MatrixXcd g = build_channel(sys.modes, t, threads).gamma;
        diag = std::max(diag, (g.diagonal().array() - 1.0).abs().maxCoeff());
        herm = std::max(herm, (g - g.adjoint()).cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> s(g, Eigen::EigenvaluesOnly);
        min_eig = std::min(min_eig, s.eigenvalues().minCoeff());
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Random(g.rows(), g.rows());
        DensityMatrix rho{a * a.adjoint(), Basis::eigen};
        rho.matrix /= rho.matrix.trace();
        const DensityMatrix out_rho = apply_channel(rho, g);
        trace = std::max(trace, std::abs(out_rho.matrix.trace() - 1.0));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> r(out_rho.matrix, Eigen::EigenvaluesOnly);
        min_rho = std::min(min_rho, r.eigenvalues().minCoeff());
        ++draws;
      } catch (const Error& e) {
        ok = false;
        failure = e.what();
      }
    }
    ok = ok && initial <= 1e-10 && diag <= 1e-8 && herm <= 1e-10 && min_eig > -1e-8 &&
         trace <= 1e-10 && min_rho > -1e-8;
    detail.str("");
    detail << draws << " draws, |Gamma(0)-1| " << initial << ", |Gamma_nn-1| " << diag
           << ", min eig " << min_eig << ", |tr-1| " << trace << ", min rho eig " << min_rho;
    if (!failure.empty()) detail << ", error: " << failure;
    out.push_back({"channel validity", ok, detail.str()});
  }

  // Gram-Schmidt basis.
  {
    double orth = 0, com = 0, closed = 0;
    for (Eigen::Index L = 2; L <= 50; ++L) {
      const Eigen::MatrixXd g = gram_schmidt(L);
      orth = std::max(orth, (g * g.transpose() - Eigen::MatrixXd::Identity(L - 1, L - 1))
                                .cwiseAbs()
                                .maxCoeff());
      com = std::max(com, (g * Eigen::VectorXd::Ones(L)).cwiseAbs().maxCoeff());
      closed = std::max(closed, (g - gram_schmidt_closed_form(L)).cwiseAbs().maxCoeff());
    }
    detail.str("");
    detail << "|GG^T-I| " << orth << ", |G1| " << com << ", |closed-iterative| " << closed;
    out.push_back({"gram-schmidt", orth <= 1e-12 && com <= 1e-12 && closed <= 1e-12,
                   detail.str()});
  }

  // Removable singularity at omega -> 0.
  {
    double worst = 0;
    for (double f : {0.0, 0.7, 5.0}) {
      const ModeCoefficients a = mode_coefficients(1e-12, f, 1.0);
      const ModeCoefficients b = free_mode_limit(f, 1.0);
      const auto rel = [](cdouble x, cdouble y) { return std::abs(x - y) / std::max(1.0, std::abs(y)); };
      worst = std::max({worst, rel(a.kbar, b.kbar), rel(a.bbar, b.bbar), rel(a.alpha, b.alpha),
                        rel(a.gamma, b.gamma)});
    }
    detail.str("");
    detail << "max relative deviation " << worst;
    out.push_back({"free-mode limit", worst <= 1e-10, detail.str()});
  }

  // Oracle: norm conservation and time-step convergence on a short run.
  try {
    PhysicalParams p;
    p.atom_mass = 86.909;
    p.trap_frequency = 1e5;
    p.trap_centers = Eigen::Vector2d(0.0, 3.2e-6);
    p.rabi = Eigen::Vector2d::Constant(2.0 * constants::pi * 1e7);
    p.detuning = Eigen::Vector2d::Zero();
    p.interaction_coefficient = kIllustrativeC6;
    const NormalizedChain c = normalize(p);
    ExactOptions o;
    o.grid = grid_for(c.force[0], 0.5);
    o.richardson = true;
    o.richardson_tol = 1e-5;
    const ExactResult r = evolve_exact(c, basis_state(0, 4).matrix, {0.0, 0.25, 0.5}, o);
    const double drift = std::abs(r.norm.back() - 1.0);
    detail.str("");
    detail << "norm drift " << drift << ", step change " << r.richardson_change;
    out.push_back({"oracle convergence", drift < 1e-10, detail.str()});
  } catch (const Error& e) {
    out.push_back({"oracle convergence", false, e.what()});
  }
  return out;
}

}  // namespace rydchan
