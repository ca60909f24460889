#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace casimir3::quadrature {

template <std::size_t N>
using Vec = std::array<double, N>;

struct Tolerance {
  double relative = 1e-10;
  double absolute = 0.0;
  int max_intervals = 2000;
};

template <std::size_t N>
struct Result {
  Vec<N> value{};
  Vec<N> error{};
  // Global estimate before the final refinement; the pair (previous, value)
  // is what gets reported when convergence fails.
  Vec<N> previous{};
  int evaluations = 0;
  int intervals = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Segment {
  double a;
  double b;
  Vec<N> value;
  Vec<N> error;
  double priority;
  bool operator<(const Segment& other) const { return priority < other.priority; }
};

template <std::size_t N, class F>
Segment<N> gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Vec<N> kronrod{};
  Vec<N> gauss{};
  const Vec<N> fc = f(center);
  for (std::size_t k = 0; k < N; ++k) {
    kronrod[k] = kWgk[7] * fc[k];
    gauss[k] = kWg[3] * fc[k];
  }
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const Vec<N> f1 = f(center - dx);
    const Vec<N> f2 = f(center + dx);
    for (std::size_t k = 0; k < N; ++k) {
      const double sum = f1[k] + f2[k];
      kronrod[k] += kWgk[j] * sum;
      if (j % 2 == 1) gauss[k] += kWg[j / 2] * sum;
    }
  }
  Segment<N> seg{a, b, {}, {}, 0.0};
  for (std::size_t k = 0; k < N; ++k) {
    seg.value[k] = kronrod[k] * half;
    seg.error[k] = std::abs((kronrod[k] - gauss[k]) * half);
  }
  return seg;
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod (7/15) integration of a vector-valued
// integrand over [breaks.front(), breaks.back()], starting from the
// subintervals given by `breaks`. Every component must meet
// err_k <= max(absolute, relative * |I_k|).
template <std::size_t N, class F>
Result<N> integrate(F&& f, std::span<const double> breaks, const Tolerance& tol = {}) {
  using Seg = detail::Segment<N>;
  Result<N> out;
  std::priority_queue<Seg> queue;
  Vec<N> total{};
  Vec<N> total_err{};

  auto add = [&](Seg s, int sign) {
    for (std::size_t k = 0; k < N; ++k) {
      total[k] += sign * s.value[k];
      total_err[k] += sign * s.error[k];
    }
  };
  auto score = [&](Seg& s) {
    double p = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const double scale = std::max(tol.absolute, tol.relative * std::abs(total[k]));
      const double ratio = scale > 0.0 ? s.error[k] / scale : s.error[k];
      p = std::max(p, ratio);
    }
    s.priority = p;
  };
  auto done = [&] {
    for (std::size_t k = 0; k < N; ++k) {
      const double scale = std::max(tol.absolute, tol.relative * std::abs(total[k]));
      if (total_err[k] > scale) return false;
    }
    return true;
  };

  std::vector<Seg> initial;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    initial.push_back(detail::gk15<N>(f, breaks[i], breaks[i + 1]));
    out.evaluations += 15;
    add(initial.back(), +1);
  }
  for (auto& s : initial) {
    score(s);
    queue.push(s);
  }
  out.previous = total;

  while (!done()) {
    if (static_cast<int>(queue.size()) >= tol.max_intervals) break;
    Seg worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      queue.push(worst);
      break;
    }
    out.previous = total;
    add(worst, -1);
    Seg left = detail::gk15<N>(f, worst.a, mid);
    Seg right = detail::gk15<N>(f, mid, worst.b);
    out.evaluations += 30;
    add(left, +1);
    add(right, +1);
    score(left);
    score(right);
    queue.push(left);
    queue.push(right);
  }

  out.converged = done();
  out.intervals = static_cast<int>(queue.size());
  out.value = total;
  out.error = total_err;
  return out;
}

// Scalar convenience wrapper.
template <class F>
Result<1> integrate_scalar(F&& f, double a, double b, const Tolerance& tol = {}) {
  const std::array<double, 2> breaks{a, b};
  auto wrapped = [&f](double x) { return Vec<1>{f(x)}; };
  return integrate<1>(wrapped, std::span<const double>(breaks), tol);
}

}  // namespace casimir3::quadrature
