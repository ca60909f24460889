#include <doctest.h>

#include <cmath>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"
#include "casimir3/material.hpp"
#include "casimir3/matsubara.hpp"

using namespace casimir3;

TEST_CASE("drude permittivity by hand") {
  const double wp = 1.37e16, gd = 5.32e13, xi = 1.0e15;
  const auto m = MaterialModel::drude(wp, gd);
  const double expected = 1.0 + (1.37e16 * 1.37e16) / (1.0e15 * (1.0e15 + 5.32e13));
  const auto eps = permittivity_at(m, xi);
  CHECK_FALSE(eps.infinite);
  CHECK(eps.value == doctest::Approx(expected).epsilon(1e-13));
  CHECK(expected == doctest::Approx(179.14).epsilon(1e-3));
}

TEST_CASE("drude transparency at high frequency") {
  const auto m = MaterialModel::gold_drude();
  CHECK(permittivity_at(m, 1e22).value == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("drude and plasma diverge at zero frequency") {
  CHECK(permittivity_at(MaterialModel::gold_drude(), 0.0).infinite);
  CHECK(permittivity_at(MaterialModel::gold_plasma(), 0.0).infinite);
  CHECK(permittivity_at(MaterialModel::ideal(), 1e14).infinite);
}

TEST_CASE("tabulated single node") {
  const TabulatedPermittivity t({{3.0e14, 5.0}});
  CHECK(t(3.0e14) == 5.0);
  CHECK(t(1.0e13) == 5.0);
  CHECK(t(1.0e16) == 5.0);
}

TEST_CASE("tabulated log-log interpolation") {
  const TabulatedPermittivity t({{1e14, 100.0}, {1e16, 1.0}});
  // log-linear midpoint in log ξ: ε = 10
  CHECK(t(1e15) == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("tabulated rejects bad input") {
  CHECK_THROWS_AS(TabulatedPermittivity({}), ConfigError);
  CHECK_THROWS_AS(TabulatedPermittivity({{2e14, 3.0}, {1e14, 4.0}}), ConfigError);
  CHECK_THROWS_AS(TabulatedPermittivity({{1e14, 0.5}}), ConfigError);
  CHECK_THROWS_AS(TabulatedPermittivity({{-1.0, 2.0}}), ConfigError);
}

TEST_CASE("ideal conductor reflection") {
  for (double xi : {0.0, 1e13, 1e16})
    for (double k : {0.0, 1e6, 1e8}) {
      if (xi == 0.0 && k == 0.0) continue;
      const auto r = reflection_coefficients(MaterialModel::ideal(), xi, k);
      CHECK(r.te == -1.0);
      CHECK(r.tm == 1.0);
    }
}

TEST_CASE("reflection undefined at the origin") {
  CHECK_THROWS_AS(reflection_coefficients(MaterialModel::ideal(), 0.0, 0.0), DomainError);
}

TEST_CASE("vacuum half-space does not reflect") {
  const auto vac = MaterialModel::tabulated(TabulatedPermittivity({{1e14, 1.0}}));
  for (double xi : {1e13, 1e15})
    for (double k : {0.0, 1e7}) {
      const auto r = reflection_coefficients(vac, xi, k);
      CHECK(r.te == doctest::Approx(0.0));
      CHECK(r.tm == doctest::Approx(0.0));
    }
}

TEST_CASE("drude gold reflection at first matsubara frequency") {
  const double c = 299792458.0;
  const double hbar = 6.62607015e-34 / (2.0 * 3.14159265358979323846);
  const double xi = 2.0 * 3.14159265358979323846 * 1.380649e-23 * 300.0 / hbar;
  const double ev = 1.602176634e-19 / hbar;
  const double wp = 9.0 * ev, gd = 0.035 * ev;
  const double k = 1e7;
  const double eps = 1.0 + wp * wp / (xi * (xi + gd));
  const double q = std::sqrt(k * k + xi * xi / (c * c));
  const double km = std::sqrt(k * k + eps * xi * xi / (c * c));
  const double te = (q - km) / (q + km);
  const double tm = (eps * q - km) / (eps * q + km);

  const auto r = reflection_coefficients(MaterialModel::gold_drude(), xi, k);
  CHECK(r.te == doctest::Approx(te).epsilon(1e-10));
  CHECK(r.tm == doctest::Approx(tm).epsilon(1e-10));
  CHECK(r.te < 0.0);
  CHECK(r.tm > 0.0);
}

TEST_CASE("negative frequency is a domain error") {
  CHECK_THROWS_AS(permittivity_at(MaterialModel::gold_drude(), -1.0), DomainError);
}

TEST_CASE("matsubara spacing") {
  const double hbar = 6.62607015e-34 / (2.0 * 3.14159265358979323846);
  const double expected = 2.0 * 3.14159265358979323846 * 1.380649e-23 * 300.0 / hbar;
  CHECK(matsubara_spacing(300.0) == doctest::Approx(expected).epsilon(1e-12));
  CHECK(matsubara_spacing(300.0) == doctest::Approx(2.47e14).epsilon(5e-3));

  const MatsubaraGrid grid(300.0, 4);
  const auto f = grid.frequencies();
  const auto w = grid.weights();
  REQUIRE(f.size() == 5);
  CHECK(f[0] == 0.0);
  CHECK(f[3] == doctest::Approx(3.0 * expected).epsilon(1e-12));
  CHECK(w[0] == 0.5);
  CHECK(w[1] == 1.0);
}
