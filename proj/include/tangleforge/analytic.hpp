#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "tangleforge/errors.hpp"
#include "tangleforge/linalg.hpp"

namespace tangleforge {

/// Branch points of the piecewise three-tangle of the sigma family, stored in
/// closed form (the six-decimal values floating around are display artifacts).
struct Thresholds {
  double x0 = 0.75;
  double x1 = (2.0 + std::sqrt(3.0)) / 4.0;
  double x_star = (1.0 + std::cbrt(2.0) + std::cbrt(4.0)) / 4.0;
};

namespace detail {

inline void check_unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    fail(errc::bad_parameter, std::string(name) + " must lie in [0,1]");
}

// sqrt(x (1-x)^3), nonnegative real branch.
inline double sqrt_x_cubed(double x) { return std::sqrt(x * (1.0 - x) * (1.0 - x) * (1.0 - x)); }

}  // namespace detail

/// Closed-form three-tangle of |J(theta1, theta2)>; symmetric in its
/// arguments.
inline double tau_j(double theta1, double theta2) {
  const Complex e1 = std::exp(I_UNIT * theta1);
  const Complex e2 = std::exp(I_UNIT * theta2);
  const Complex diff = e1 - e2;
  const Complex sum = e1 + e2;
  return std::abs(1.0 - diff * diff) * std::abs(1.0 - sum * sum) / 9.0;
}

/// The eight angle pairs where tau_j vanishes.
inline std::array<std::pair<double, double>, 8> j_zero_angles() {
  using std::numbers::pi;
  return {{{pi / 3, 2 * pi / 3},
           {5 * pi / 3, 4 * pi / 3},
           {2 * pi / 3, pi / 3},
           {4 * pi / 3, 5 * pi / 3},
           {pi / 3, 5 * pi / 3},
           {5 * pi / 3, pi / 3},
           {2 * pi / 3, 4 * pi / 3},
           {4 * pi / 3, 2 * pi / 3}}};
}

/// Closed-form three-tangle of |X(x, phi1, phi2, phi3)>.
inline double tau_x(double x, double phi1, double phi2, double phi3) {
  detail::check_unit_interval(x, "x");
  const double omx = 1.0 - x;
  auto e = [](double a) { return std::exp(I_UNIT * a); };
  const Complex quartic = e(4 * phi1) + e(4 * phi2) + e(4 * phi3);
  const Complex quadratic = e(2 * phi1) + e(2 * phi2) + e(2 * phi3);
  const Complex pairs = e(2 * (phi1 + phi2)) + e(2 * (phi1 + phi3)) + e(2 * (phi2 + phi3));
  const Complex val = x * x + omx * omx / 9.0 * quartic - 2.0 / 3.0 * x * omx * quadratic -
                      2.0 / 9.0 * omx * omx * pairs -
                      8.0 * std::sqrt(3.0) / 9.0 * detail::sqrt_x_cubed(x) *
                          e(phi1 + phi2 + phi3);
  return std::abs(val);
}

/// Ensemble-average three-tangle of the zero-phase X decomposition of sigma,
/// taken as if it stayed optimal for all x.
inline double alpha_I(double x) {
  detail::check_unit_interval(x, "x");
  const double omx = 1.0 - x;
  return x * x - omx * omx / 3.0 - 2.0 * x * omx -
         8.0 * std::sqrt(3.0) / 9.0 * detail::sqrt_x_cubed(x);
}

/// Linear interpolation between alpha_I(x1) and 1; the convexified branch.
inline double alpha_II(double x, double x1) {
  const Thresholds th;
  require(x1 > th.x0 && x1 < 1.0, errc::bad_parameter, "x1 must lie in (x0, 1)");
  require(x >= x1 - 1e-12 && x <= 1.0, errc::bad_parameter, "x must lie in [x1, 1]");
  return (1.0 - x) / (1.0 - x1) * alpha_I(x1) + (x - x1) / (1.0 - x1);
}

/// Piecewise three-tangle of sigma(x): 0, then alpha_I, then alpha_II.
/// Continuous at both branch points.
inline double tau_sigma(double x) {
  detail::check_unit_interval(x, "x");
  const Thresholds th;
  if (x <= th.x0) return 0.0;
  if (x <= th.x1) return alpha_I(x);
  return alpha_II(x, th.x1);
}

/// Closed-form squared concurrence of the A|(BC) split of sigma(x).
inline double one_tangle_sigma(double x) {
  detail::check_unit_interval(x, "x");
  return (5.0 - 4.0 * x + 8.0 * x * x -
          8.0 * std::sqrt(3.0 * x * (1.0 - x) * (1.0 - x) * (1.0 - x))) /
         9.0;
}

/// Upper bound xi * tau_sigma(x) on the three-tangle of the rank-8 state.
/// Only established for y <= 3/4 (where the tilde part has zero tangle);
/// refuses to extrapolate beyond that.
inline double rank8_upper_bound(double xi, double x, double y) {
  detail::check_unit_interval(xi, "xi");
  detail::check_unit_interval(x, "x");
  require(y >= 0.0 && y <= 0.75, errc::bad_parameter,
          "bound not established for y > 3/4");
  return xi * tau_sigma(x);
}

}  // namespace tangleforge
