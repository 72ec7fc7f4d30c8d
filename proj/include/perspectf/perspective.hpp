// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <utility>

#include "perspectf/error.hpp"
#include "perspectf/grid.hpp"

namespace perspectf {

/// Perspective of |.|^2/2 + 1/2:
///   |x|^2/(2 sigma) + sigma/2   if sigma > 0
///   0                           if x = 0 and sigma = 0
///   +inf                        otherwise
inline double phi_value(Complex x, double sigma) noexcept {
  if (sigma > 0.0) return std::norm(x) / (2.0 * sigma) + 0.5 * sigma;
  if (sigma == 0.0 && x == Complex{}) return 0.0;
  return std::numeric_limits<double>::infinity();
}

inline double varphi_value(const CoefficientGrid& x, const WeightGrid& sigma) {
  require_same_shape(x, sigma, "varphi_value");
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += phi_value(x[k], sigma[k]);
  return acc;
}

/// Positive root s of s^3 + p s + q = 0 with p = 2 sigma/tau + 1, q = -2|x|/tau.
struct CubicRoot {
  double p = 0.0;
  double q = 0.0;
  double r = 0.0;  // -q^2/4 - p^3/27
  double s = 0.0;

  double residual() const noexcept { return s * s * s + p * s + q; }
};

inline CubicRoot solve_prox_cubic(double abs_x, double sigma, double tau) {
  if (!(abs_x > 0.0))
    throw Error(ErrorKind::PreconditionViolated, "cubic root requested for a zero coefficient");
  if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveStep, "tau must be positive");

  CubicRoot c;
  c.p = 2.0 * sigma / tau + 1.0;
  c.q = -2.0 * abs_x / tau;
  c.r = -c.q * c.q / 4.0 - c.p * c.p * c.p / 27.0;

  if (c.r < 0.0) {
    // One real root. The second cube root equals -p/(3A), which avoids
    // cancelling -q/2 against sqrt(-r).
    const double a = std::cbrt(-c.q / 2.0 + std::sqrt(-c.r));
    c.s = a - c.p / (3.0 * a);
  } else if (c.r == 0.0) {
    c.s = 2.0 * std::cbrt(-c.q / 2.0);
  } else {
    // Three real roots (p < 0); the largest is the positive one.
    const double radius = std::cbrt(std::sqrt(c.q * c.q / 4.0 + c.r));
    c.s = 2.0 * radius * std::cos(std::atan2(2.0 * std::sqrt(c.r), -c.q) / 3.0);
  }

  // Newton polish while it keeps reducing the residual.
  for (int it = 0; it < 3; ++it) {
    const double f = c.residual();
    const double df = 3.0 * c.s * c.s + c.p;
    if (f == 0.0 || !(df > 0.0)) break;
    CubicRoot next = c;
    next.s = c.s - f / df;
    if (!(next.s > 0.0) || std::abs(next.residual()) >= std::abs(f)) break;
    c = next;
  }
  return c;
}

enum class ProxCase { Zero, ShiftWeight, Shrink };

/// Which branch of the entrywise prox applies. Ties on the first boundary go
/// to ProxCase::Zero.
inline ProxCase classify_prox(Complex x, double sigma, double tau) noexcept {
  const double abs2 = std::norm(x);
  if (2.0 * tau * sigma + abs2 <= tau * tau) return ProxCase::Zero;
  if (x == Complex{} && 2.0 * sigma > tau) return ProxCase::ShiftWeight;
  return ProxCase::Shrink;
}

struct PerspectivePoint {
  Complex x;
  double sigma = 0.0;
};

inline PerspectivePoint prox_perspective_entry(Complex x, double sigma, double tau) {
  switch (classify_prox(x, sigma, tau)) {
    case ProxCase::Zero:
      return {Complex{}, 0.0};
    case ProxCase::ShiftWeight:
      return {Complex{}, sigma - 0.5 * tau};
    case ProxCase::Shrink:
      break;
  }
  const double abs_x = std::abs(x);
  const double s = solve_prox_cubic(abs_x, sigma, tau).s;
  return {x * (1.0 - tau * s / abs_x), sigma + 0.5 * tau * (s * s - 1.0)};
}

/// prox of tau * varphi, computed entry by entry.
inline std::pair<CoefficientGrid, WeightGrid> prox_perspective(const CoefficientGrid& x,
                                                               const WeightGrid& sigma,
                                                               double tau) {
  require_same_shape(x, sigma, "prox_perspective");
  if (!(tau > 0.0)) throw Error(ErrorKind::NonPositiveStep, "tau must be positive");
  std::pair<CoefficientGrid, WeightGrid> out{CoefficientGrid(x.channels(), x.frames()),
                                             WeightGrid(x.channels(), x.frames())};
  for (std::size_t k = 0; k < x.size(); ++k) {
    const auto pt = prox_perspective_entry(x[k], sigma[k], tau);
    out.first[k] = pt.x;
    out.second[k] = pt.sigma;
  }
  return out;
}

}  // namespace perspectf
