#include <doctest.h>

#include <cmath>

#include "casimir3/errors.hpp"
#include "casimir3/geometry.hpp"

using namespace casimir3;

namespace {

const CasimirTable& table() {
  static const CasimirTable t =
      CasimirTable::build(MaterialModel::gold_drude(), 35e-6, 300.0, {50e-9, 1e-6, 150});
  return t;
}

}  // namespace

TEST_CASE("ideal net force vanishes for a symmetric layout") {
  CHECK(ideal_net_force_center({150e-9, 150e-9, 35e-6, 35e-6}) == 0.0);
}

TEST_CASE("ideal net force closed form") {
  const double f = ideal_net_force_center({100e-9, 200e-9, 35e-6, 35e-6});
  const double pi = 3.14159265358979323846;
  const double hbar_c = 6.62607015e-34 / (2.0 * pi) * 299792458.0;
  const double expected = pi * pi * pi * hbar_c / 360.0 * 35e-6 * (1e21 - 1e21 / 8.0);
  CHECK(f == doctest::Approx(expected).epsilon(1e-12));
  CHECK(f == doctest::Approx(8.3e-11).epsilon(5e-3));
}

TEST_CASE("swapping gaps flips the sign") {
  const double a = ideal_net_force_center({120e-9, 260e-9, 35e-6, 35e-6});
  const double b = ideal_net_force_center({260e-9, 120e-9, 35e-6, 35e-6});
  CHECK(a == doctest::Approx(-b).epsilon(1e-14));
  const double c = net_force_center(table(), table(), {120e-9, 260e-9, 35e-6, 35e-6});
  const double d = net_force_center(table(), table(), {260e-9, 120e-9, 35e-6, 35e-6});
  CHECK(c == doctest::Approx(-d).epsilon(1e-14));
  CHECK(c > 0.0);
}

TEST_CASE("table net force zero for equal gaps") {
  CHECK(net_force_center(table(), table(), {333e-9, 333e-9, 35e-6, 35e-6}) == 0.0);
}

TEST_CASE("net force is the difference of pair forces at nodes") {
  const auto x = table().separations();
  const Geometry g{x[10], x[40], 35e-6, 35e-6};
  CHECK(net_force_center(table(), table(), g) == table().forces()[10] - table().forces()[40]);
}

TEST_CASE("zero crossing at 380 nm for d1 + d2 = 760 nm") {
  auto net = [](double d1) {
    return net_force_center(table(), table(), {d1, 760e-9 - d1, 35e-6, 35e-6});
  };
  double lo = 200e-9, hi = 560e-9;
  REQUIRE(net(lo) > 0.0);
  REQUIRE(net(hi) < 0.0);
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    (net(mid) > 0.0 ? lo : hi) = mid;
  }
  CHECK(0.5 * (lo + hi) == doctest::Approx(380e-9).epsilon(1e-9));
}

TEST_CASE("pair gradient magnitude decreases with separation") {
  double previous = INFINITY;
  for (double d2 = 150e-9; d2 <= 600e-9; d2 += 25e-9) {
    const double g = std::abs(table().evaluate(d2).gradient);
    CHECK(g < previous);
    previous = g;
  }
}

TEST_CASE("errors") {
  CHECK_THROWS_AS(net_force_center(table(), table(), {40e-9, 200e-9, 35e-6, 35e-6}), RangeError);
  CHECK_THROWS_AS((Geometry{100e-9, 100e-9, 0.5e-6, 35e-6}.validate()), ConfigError);
  CHECK_THROWS_AS((Geometry{-1e-9, 100e-9, 35e-6, 35e-6}.validate()), ConfigError);
  CHECK_NOTHROW((Geometry{}.validate()));
}
