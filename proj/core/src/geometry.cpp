#include "casimir3/geometry.hpp"

#include <string>

#include "casimir3/constants.hpp"
#include "casimir3/errors.hpp"

namespace casimir3 {

void Geometry::validate() const {
  auto check_gap = [](double d, const char* key) {
    if (!(d >= 1e-9 && d <= 1e-5)) throw ConfigError("gap must lie in [1 nm, 10 um]", key);
  };
  check_gap(d1, "geometry.d1");
  check_gap(d2, "geometry.d2");
  if (!(R1 > 0.0)) throw ConfigError("sphere radius must be positive", "geometry.r1");
  if (!(R2 > 0.0)) throw ConfigError("sphere radius must be positive", "geometry.r2");
  if (R1 / d1 < 10.0 || R2 / d2 < 10.0)
    throw ConfigError("proximity-force approximation needs R/d >= 10", "geometry");
}

double ideal_net_force_center(const Geometry& geom) {
  geom.validate();
  constexpr double pi = units::kPi;
  const double a = pi * pi * pi * kCodata2018.hbar * kCodata2018.c / 360.0;
  return a * (geom.R1 / (geom.d1 * geom.d1 * geom.d1) - geom.R2 / (geom.d2 * geom.d2 * geom.d2));
}

double net_force_center(const CasimirTable& table1, const CasimirTable& table2,
                        const Geometry& geom) {
  auto pair_force = [](const CasimirTable& t, double d, const char* name) {
    if (!t.contains(d))
      throw RangeError(std::string(name) + " = " + std::to_string(d * 1e9) +
                       " nm outside the Casimir table range");
    return t.force(d);
  };
  return pair_force(table1, geom.d1, "d1") - pair_force(table2, geom.d2, "d2");
}

}  // namespace casimir3
