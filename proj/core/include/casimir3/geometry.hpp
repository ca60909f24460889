#pragma once

#include "casimir3/casimir_table.hpp"

namespace casimir3 {

// Sphere-plate-sphere arrangement. d1 is the gap between cantilever 1 and
// the center plate, d2 between the center plate and cantilever 3; R1 and R2
// are the sphere radii on cantilevers 1 and 3.
struct Geometry {
  double d1 = 100e-9;
  double d2 = 100e-9;
  double R1 = 35e-6;
  double R2 = 35e-6;

  // Gaps in [1 nm, 10 um], radii > 0, R/d >= 10. Throws ConfigError.
  void validate() const;
};

// Perfect-conductor net force on the center plate,
// (π³ħc/360)(R1/d1³ - R2/d2³); positive toward cantilever 1.
double ideal_net_force_center(const Geometry& geom);

// Net force F_C(d1) - F_C(d2) on the center plate from the pair tables
// (table1 for the d1 pair, table2 for the d2 pair). Throws RangeError naming
// the offending gap.
double net_force_center(const CasimirTable& table1, const CasimirTable& table2,
                        const Geometry& geom);

}  // namespace casimir3
