#include <doctest.h>

#include <cmath>
#include <sstream>

#include "casimir3/casimir_table.hpp"
#include "casimir3/errors.hpp"

using namespace casimir3;

namespace {

const CasimirTable& ideal_table() {
  static const CasimirTable t =
      CasimirTable::build(MaterialModel::ideal(), 35e-6, 0.0, {50e-9, 1e-6, 120});
  return t;
}

const CasimirTable& gold_table() {
  static const CasimirTable t =
      CasimirTable::build(MaterialModel::gold_drude(), 35e-6, 300.0, {50e-9, 1e-6, 120}, 2);
  return t;
}

}  // namespace

TEST_CASE("ideal table derivatives at 100 nm") {
  const auto v = ideal_table().evaluate(100e-9);
  const auto exact = ideal_sphere_plate(35e-6, 100e-9);
  CHECK(v.force == doctest::Approx(exact.force).epsilon(1e-8));
  CHECK(v.gradient == doctest::Approx(exact.gradient).epsilon(1e-7));
  CHECK(v.curvature == doctest::Approx(exact.curvature).epsilon(1e-5));
  CHECK(v.gradient == doctest::Approx(-2.86e-3).epsilon(2e-3));
  CHECK(v.curvature == doctest::Approx(1.14e5).epsilon(5e-3));
}

TEST_CASE("force_derivatives away from the edges") {
  const auto gc = force_derivatives(ideal_table(), 100e-9);
  const auto exact = ideal_sphere_plate(35e-6, 100e-9);
  CHECK(gc.gradient == doctest::Approx(exact.gradient).epsilon(1e-7));
  CHECK(gc.curvature == doctest::Approx(exact.curvature).epsilon(1e-5));
  CHECK_THROWS_AS(force_derivatives(ideal_table(), 50.5e-9), RangeError);
  CHECK_THROWS_AS(force_derivatives(ideal_table(), 0.999e-6), RangeError);
}

TEST_CASE("gradient column agrees with differenced force column") {
  const auto& t = gold_table();
  const auto x = t.separations();
  const auto f = t.forces();
  const auto g = t.gradients();
  for (std::size_t i = 1; i + 1 < x.size(); ++i) {
    const double fd = (f[i + 1] - f[i - 1]) / (x[i + 1] - x[i - 1]);
    CHECK(g[i] == doctest::Approx(fd).epsilon(0.01));
  }
}

TEST_CASE("table signs for attraction") {
  const auto& t = gold_table();
  for (std::size_t i = 0; i < t.separations().size(); ++i) {
    CHECK(t.forces()[i] > 0.0);
    CHECK(t.gradients()[i] < 0.0);
    CHECK(t.curvatures()[i] > 0.0);
  }
}

TEST_CASE("interpolation between nodes matches direct evaluation") {
  const auto& t = gold_table();
  for (double x : {63.3e-9, 101.7e-9, 243.1e-9, 777.7e-9}) {
    const auto direct = pfa_sphere_plate(MaterialModel::gold_drude(), 35e-6, x, 300.0);
    const auto v = t.evaluate(x);
    CHECK(v.force == doctest::Approx(direct.force).epsilon(1e-7));
    CHECK(v.gradient == doctest::Approx(direct.gradient).epsilon(1e-6));
    CHECK(v.curvature == doctest::Approx(direct.curvature).epsilon(1e-4));
    CHECK(t.force(x) == v.force);
  }
}

TEST_CASE("nodes are reproduced exactly") {
  const auto& t = gold_table();
  const auto x = t.separations();
  for (std::size_t i : {std::size_t{0}, std::size_t{17}, x.size() - 1}) {
    const auto v = t.evaluate(x[i]);
    CHECK(v.force == doctest::Approx(t.forces()[i]).epsilon(1e-13));
    CHECK(v.gradient == doctest::Approx(t.gradients()[i]).epsilon(1e-10));
  }
}

TEST_CASE("out of range lookups throw") {
  CHECK_THROWS_AS(gold_table().evaluate(40e-9), RangeError);
  CHECK_THROWS_AS(gold_table().force(1.1e-6), RangeError);
  CHECK(gold_table().contains(1e-6));
  CHECK_FALSE(gold_table().contains(49e-9));
}

TEST_CASE("csv round trip") {
  std::stringstream ss;
  gold_table().write_csv(ss);
  const std::string text = ss.str();
  CHECK(text.rfind("separation_m,force_N,gradient_N_per_m,curvature_N_per_m2,temperature_K\n",
                   0) == 0);
  const auto back = CasimirTable::read_csv(ss);
  REQUIRE(back.separations().size() == gold_table().separations().size());
  for (std::size_t i = 0; i < back.separations().size(); ++i) {
    CHECK(back.separations()[i] == gold_table().separations()[i]);
    CHECK(back.forces()[i] == gold_table().forces()[i]);
    CHECK(back.gradients()[i] == gold_table().gradients()[i]);
    CHECK(back.curvatures()[i] == gold_table().curvatures()[i]);
  }
  CHECK(back.temperature() == 300.0);
  CHECK(back.evaluate(123e-9).force == gold_table().evaluate(123e-9).force);
}

TEST_CASE("csv rejects malformed input") {
  std::stringstream bad_header("x,y\n1,2\n");
  CHECK_THROWS_AS(CasimirTable::read_csv(bad_header), ConfigError);
  std::stringstream bad_row(
      "separation_m,force_N,gradient_N_per_m,curvature_N_per_m2,temperature_K\n1e-7,1,2\n");
  CHECK_THROWS_AS(CasimirTable::read_csv(bad_row), ConfigError);
}

TEST_CASE("from_columns validates") {
  CHECK_THROWS_AS(CasimirTable::from_columns({2e-7, 1e-7}, {1, 1}, {1, 1}, {1, 1}, 300.0),
                  ConfigError);
  CHECK_THROWS_AS(CasimirTable::from_columns({1e-7, 2e-7}, {1}, {1, 1}, {1, 1}, 300.0),
                  ConfigError);
}

TEST_CASE("quintic interpolant is exact for quintic data") {
  // F = 1 + x + x² ... x⁵ (scaled) reproduced exactly by a two-node table.
  auto f = [](double x) { return 1.0 + x * (2.0 + x * (-1.0 + x * (0.5 + x * (0.25 + x * 0.1)))); };
  auto g = [](double x) { return 2.0 + x * (-2.0 + x * (1.5 + x * (1.0 + x * 0.5))); };
  auto c = [](double x) { return -2.0 + x * (3.0 + x * (3.0 + x * 2.0)); };
  const auto t = CasimirTable::from_columns({0.0, 1.0}, {f(0), f(1)}, {g(0), g(1)}, {c(0), c(1)}, 0.0);
  for (double x : {0.1, 0.37, 0.8}) {
    CHECK(t.evaluate(x).force == doctest::Approx(f(x)).epsilon(1e-13));
    CHECK(t.evaluate(x).gradient == doctest::Approx(g(x)).epsilon(1e-12));
    CHECK(t.evaluate(x).curvature == doctest::Approx(c(x)).epsilon(1e-12));
  }
}
