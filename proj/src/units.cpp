#include "rydchan/units.hpp"

#include <cmath>
#include <string>

#include "rydchan/errors.hpp"

namespace rydchan {

double trap_width(double trap_frequency_hz, double atom_mass_amu) {
  const double m = atom_mass_amu * constants::amu;
  return std::sqrt(constants::hbar / (2.0 * constants::pi * trap_frequency_hz * m));
}

double trap_frequency_for_width(double sigma0_m, double atom_mass_amu) {
  const double m = atom_mass_amu * constants::amu;
  return constants::hbar / (2.0 * constants::pi * m * sigma0_m * sigma0_m);
}

double power_law_interaction(double c_alpha, int alpha, double r0) {
  if (!(r0 > 0.0)) throw DomainError("interaction distance must be positive");
  return c_alpha * std::pow(r0, -alpha);
}

double linearized_force(double c_alpha, int alpha, double r0) {
  if (!(r0 > 0.0)) throw DomainError("interaction distance must be positive");
  return alpha * c_alpha * std::pow(r0, -(alpha + 1));
}

void validate(const PhysicalParams& p) {
  const Eigen::Index L = p.size();
  if (L < 2) throw ConfigError("chain needs at least two trap centers");
  for (Eigen::Index l = 0; l + 1 < L; ++l) {
    if (!(p.trap_centers[l + 1] > p.trap_centers[l]))
      throw ConfigError("trap_centers must be strictly increasing (index " +
                        std::to_string(l + 1) + ")");
  }
  if (p.rabi.size() != L) throw ConfigError("rabi must have one entry per atom");
  if (p.detuning.size() != L) throw ConfigError("detuning must have one entry per atom");
  if (!(p.trap_frequency > 0.0)) throw ConfigError("trap_frequency must be positive");
  if (!(p.atom_mass > 0.0)) throw ConfigError("atom_mass must be positive");
  if (!(p.interaction_coefficient > 0.0))
    throw ConfigError("interaction_coefficient must be positive");
  if (p.interaction_exponent != 3 && p.interaction_exponent != 6)
    throw ConfigError("interaction_exponent must be 3 or 6");
}

NormalizedChain normalize(const PhysicalParams& p) {
  validate(p);
  const Eigen::Index L = p.size();
  const double m = p.atom_mass * constants::amu;
  const double omega_t = 2.0 * constants::pi * p.trap_frequency;

  NormalizedChain c;
  c.L = L;
  c.alpha = p.interaction_exponent;
  c.mass = m;
  c.length_scale = trap_width(p.trap_frequency, p.atom_mass);
  c.time_scale = 1.0 / omega_t;
  c.energy_scale = constants::hbar * omega_t;

  const double force_scale = c.energy_scale / c.length_scale;
  c.spacings.resize(L - 1);
  c.v0.resize(L - 1);
  c.force.resize(L - 1);
  for (Eigen::Index b = 0; b + 1 < L; ++b) {
    const double r = p.trap_centers[b + 1] - p.trap_centers[b];
    c.spacings[b] = r / c.length_scale;
    c.v0[b] = power_law_interaction(p.interaction_coefficient, c.alpha, r) / c.energy_scale;
    c.force[b] = linearized_force(p.interaction_coefficient, c.alpha, r) / force_scale;
  }
  c.omega = p.rabi * c.time_scale;
  c.delta = p.detuning * c.time_scale;
  return c;
}

double free_spread(double s0, double hbar_over_mass, double t) {
  const double r = hbar_over_mass * t / (2.0 * s0 * s0);
  return s0 * std::sqrt(1.0 + r * r);
}

}  // namespace rydchan
