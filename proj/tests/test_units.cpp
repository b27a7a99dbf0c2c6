#include <doctest.h>

#include <cmath>

#include "rydchan/errors.hpp"
#include "rydchan/units.hpp"

using namespace rydchan;

namespace {

PhysicalParams two_atoms() {
  PhysicalParams p;
  p.atom_mass = 86.909;
  p.trap_frequency = 1e5;
  p.trap_centers = Eigen::Vector2d(0.0, 3.2e-6);
  p.rabi = Eigen::Vector2d::Constant(2.0 * constants::pi * 1e7);
  p.detuning = Eigen::Vector2d::Zero();
  p.interaction_coefficient = 1.32521403e-58;
  return p;
}

}  // namespace

TEST_CASE("trap width of a 100 kHz rubidium trap") {
  // 0.034 um quoted for nu_t = 100 kHz.
  CHECK(trap_width(1e5, 86.909) == doctest::Approx(0.034e-6).epsilon(0.01));
  const double s = trap_width(2.5e3, 86.909);
  CHECK(trap_frequency_for_width(s, 86.909) == doctest::Approx(2.5e3).epsilon(1e-12));
}

TEST_CASE("linearized force is minus the derivative of the power law") {
  const double c = 1.3e-58, r = 3.1e-6, h = 1e-12;
  for (int alpha : {3, 6}) {
    const double fd =
        -(power_law_interaction(c, alpha, r + h) - power_law_interaction(c, alpha, r - h)) /
        (2.0 * h);
    CHECK(linearized_force(c, alpha, r) == doctest::Approx(fd).epsilon(1e-6));
  }
}

TEST_CASE("normalized units") {
  const PhysicalParams p = two_atoms();
  const NormalizedChain c = normalize(p);
  const double omega_t = 2.0 * constants::pi * p.trap_frequency;
  CHECK(c.L == 2);
  CHECK(c.time_scale == doctest::Approx(1.0 / omega_t));
  CHECK(c.energy_scale == doctest::Approx(constants::hbar * omega_t));
  CHECK(c.length_scale == doctest::Approx(trap_width(1e5, 86.909)));
  CHECK(c.spacings[0] == doctest::Approx(3.2e-6 / c.length_scale));
  const double v = power_law_interaction(p.interaction_coefficient, 6, 3.2e-6);
  CHECK(c.v0[0] == doctest::Approx(v / c.energy_scale));
  const double f = linearized_force(p.interaction_coefficient, 6, 3.2e-6);
  CHECK(c.force[0] == doctest::Approx(f * c.length_scale / c.energy_scale));
  CHECK(c.omega[0] == doctest::Approx(p.rabi[0] / omega_t));
  CHECK(c.from_seconds(c.to_seconds(2.5)) == doctest::Approx(2.5));
}

TEST_CASE("parameter validation") {
  PhysicalParams p = two_atoms();
  p.trap_centers = Eigen::Vector2d(1e-6, 1e-6);
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = two_atoms();
  p.rabi = Eigen::Vector3d::Ones();
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = two_atoms();
  p.interaction_exponent = 4;
  CHECK_THROWS_AS(validate(p), ConfigError);
  p = two_atoms();
  p.trap_frequency = -1.0;
  CHECK_THROWS_AS(validate(p), ConfigError);
  CHECK_NOTHROW(validate(two_atoms()));
}

TEST_CASE("free spreading") {
  CHECK(free_spread(1.0, 1.0, 0.0) == 1.0);
  CHECK(free_spread(1.0, 1.0, 2.0) == doctest::Approx(std::sqrt(2.0)));
  CHECK(free_spread(0.5, 2.0, 0.25) == doctest::Approx(0.5 * std::sqrt(1.0 + 1.0)));
}
