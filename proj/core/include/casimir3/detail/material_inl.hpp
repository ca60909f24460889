#pragma once

#include <cmath>

namespace casimir3::detail {

inline ReflectionCoefficients reflection_from_q(const Response& r, double q) {
  if (r.ideal) return {-1.0, 1.0};
  const double k_mat = std::sqrt(q * q + r.excess_k2);
  const double te = (q - k_mat) / (q + k_mat);
  if (r.eps_infinite) return {te, 1.0};
  const double eq = r.eps * q;
  return {te, (eq - k_mat) / (eq + k_mat)};
}

}  // namespace casimir3::detail
