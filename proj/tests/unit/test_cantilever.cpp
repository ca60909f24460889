#include <doctest.h>

#include "casimir3/cantilever.hpp"
#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

using namespace casimir3;
using units::hz;

TEST_CASE("gain subtracts from the damping") {
  const auto c = CantileverParams::from_stiffness(0.1, hz(6172.0), hz(6.06));
  CHECK(apply_gain(c, 0.0).gamma == c.gamma);
  CHECK(apply_gain(c, c.gamma).gamma == 0.0);
  CHECK(apply_gain(c, hz(8.73)).gamma == doctest::Approx(hz(-2.67)).epsilon(1e-12));
  CHECK_THROWS_AS(apply_gain(c, -1.0), DomainError);
}

TEST_CASE("mass and stiffness constructors agree") {
  const auto a = CantileverParams::from_stiffness(0.185, hz(5661.0), hz(3.22));
  const auto b = CantileverParams::from_mass(a.mass, a.omega, a.gamma);
  CHECK(b.k_spring == doctest::Approx(0.185).epsilon(1e-12));
}

TEST_CASE("validation") {
  CantileverParams c{1e-10, hz(5000.0), hz(3.0), 1.0, std::nullopt};
  CHECK_THROWS_AS(c.validate(), ConfigError);
  CHECK_THROWS_AS(CantileverParams::from_stiffness(-1.0, hz(5000.0), 1.0), ConfigError);
  CHECK_THROWS_AS(CantileverParams::from_mass(1e-10, 0.0, 1.0), ConfigError);
}

TEST_CASE("beam stiffness") {
  CHECK(beam_stiffness(169e9, 450e-6, 50e-6, 2e-6) == doctest::Approx(0.18546).epsilon(1e-4));
}
