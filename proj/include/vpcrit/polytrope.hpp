#pragma once

// Standard Lane-Emden polytropes:
//
//   theta'' + (2/xi) theta' + theta_+^n = 0,   theta(0) = 1, theta'(0) = 0,
//
// integrated from a short series expansion at the origin up to the first
// zero xi_n.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <string>
#include <utility>

#include "vpcrit/errors.hpp"
#include "vpcrit/numerics.hpp"

namespace vpcrit {

/// Polytropic index. Values in [0, 5) have a finite first zero; n = 5 (the
/// Plummer sphere) is admitted only for the closed form.
class PolytropeIndex {
 public:
  explicit PolytropeIndex(double n) : n_(n) {
    if (!std::isfinite(n) || n < 0.0 || n > 5.0) {
      throw domain_error("polytropic index must lie in [0, 5], got " + std::to_string(n));
    }
  }
  double value() const noexcept { return n_; }
  bool has_finite_radius() const noexcept { return n_ < 5.0; }

 private:
  double n_;
};

struct ThetaPair {
  double theta;
  double dtheta;
};

/// Largest admissible starting radius for the origin expansion.
inline constexpr double kMaxSeriesRadius = 0.01;
/// Starting radius used by solve_polytrope.
inline constexpr double kSeriesRadius = 1e-3;

/// theta = 1 - xi^2/6 + n xi^4/120 - n(8n-5) xi^6/15120 and its derivative.
inline ThetaPair series_start(PolytropeIndex index, double xi) {
  if (!(xi > 0.0) || xi > kMaxSeriesRadius) {
    throw domain_error("series_start: radius must lie in (0, 0.01], got " + std::to_string(xi));
  }
  const double n = index.value();
  const double x2 = xi * xi;
  const double c6 = n * (8.0 * n - 5.0);
  const double theta = 1.0 + x2 * (-1.0 / 6.0 + x2 * (n / 120.0 - x2 * c6 / 15120.0));
  const double dtheta = xi * (-1.0 / 3.0 + x2 * (n / 30.0 - x2 * c6 / 2520.0));
  return {theta, dtheta};
}

/// Closed-form solutions for n = 0, 1 and 5.
inline ThetaPair theta_closed_form(PolytropeIndex index, double xi) {
  if (!(xi >= 0.0)) throw domain_error("theta_closed_form: xi must be non-negative");
  const double n = index.value();
  if (n == 0.0) {
    return {1.0 - xi * xi / 6.0, -xi / 3.0};
  }
  if (n == 1.0) {
    if (xi < 0.5) {
      // sin(x)/x = sum (-1)^k x^2k / (2k+1)!; the quotient form cancels badly here.
      const double x2 = xi * xi;
      double term = 1.0, theta = 0.0, dtheta = 0.0;
      for (int k = 0; k < 10; ++k) {
        theta += term;
        dtheta += 2.0 * k * term;
        term *= -x2 / ((2.0 * k + 2.0) * (2.0 * k + 3.0));
      }
      return {theta, xi == 0.0 ? 0.0 : dtheta / xi};
    }
    const double s = std::sin(xi), c = std::cos(xi);
    return {s / xi, (xi * c - s) / (xi * xi)};
  }
  if (n == 5.0) {
    if (std::isinf(xi)) return {0.0, 0.0};
    const double u = 1.0 + xi * xi / 3.0;
    const double theta = 1.0 / std::sqrt(u);
    return {theta, -xi / 3.0 * theta / u};
  }
  throw domain_error("theta_closed_form: closed forms exist only for n = 0, 1, 5");
}

/// Right-hand side of the first-order system (theta, theta').
inline auto lane_emden_rhs(double n) {
  return [n](double xi, const State<2>& y) -> State<2> {
    const double theta_plus = std::max(y[0], 0.0);
    return {y[1], -2.0 / xi * y[1] - std::pow(theta_plus, n)};
  };
}

class Polytrope;
Polytrope solve_polytrope(PolytropeIndex index, const Tolerances& tol);

/// Solved standard polytrope on [0, xi_n]. Immutable once built.
class Polytrope {
 public:
  PolytropeIndex index() const noexcept { return index_; }
  double n() const noexcept { return index_.value(); }
  double first_zero() const noexcept { return xi_n_; }
  double slope_at_zero() const noexcept { return slope_; }
  /// -xi_n^2 theta'(xi_n), positive.
  double slope_product() const noexcept { return -xi_n_ * xi_n_ * slope_; }
  double series_radius() const noexcept { return xi_start_; }
  const DenseTrajectory<2>& profile() const noexcept { return profile_; }

  /// (theta, theta') for 0 <= xi <= xi_n. The origin expansion covers
  /// [0, xi_start); abscissae a few ulps beyond xi_n are clamped.
  ThetaPair evaluate(double xi) const {
    if (!(xi >= 0.0)) throw domain_error("Polytrope::evaluate: xi must be non-negative");
    if (xi < xi_start_) {
      if (xi == 0.0) return {1.0, 0.0};
      return series_start(index_, xi);
    }
    if (xi > xi_n_) {
      if (xi > xi_n_ * (1.0 + 1e-12)) {
        throw domain_error("Polytrope::evaluate: xi beyond the first zero");
      }
      xi = xi_n_;
    }
    const auto s = profile_(xi);
    return {s[0], s[1]};
  }

  double theta(double xi) const { return evaluate(xi).theta; }

  /// (theta, theta') by one Runge-Kutta step from the accepted node left of
  /// xi, carrying the integrator's local accuracy instead of the interpolant's.
  ThetaPair refined(double xi) const { return step_from(node_left_of(xi), xi); }

  /// theta'' from a central difference of refined() values, without using the
  /// equation itself. Needs xi_start < xi < xi_n.
  double curvature(double xi) const {
    if (!(xi > xi_start_ && xi < xi_n_)) throw domain_error("Polytrope::curvature: xi outside (xi_start, xi_n)");
    const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * xi;
    const double lo = std::max(xi - h, xi_start_);
    const double hi = std::min(xi + h, xi_n_);
    const std::size_t i = node_left_of(lo);
    return (step_from(i, hi).dtheta - step_from(i, lo).dtheta) / (hi - lo);
  }

 private:
  friend Polytrope solve_polytrope(PolytropeIndex, const Tolerances&);
  Polytrope(PolytropeIndex index, double xi_start, DenseTrajectory<2> profile, double xi_n, double slope)
      : index_(index), xi_start_(xi_start), profile_(std::move(profile)), xi_n_(xi_n), slope_(slope) {}

  std::size_t node_left_of(double xi) const {
    const auto nodes = profile_.nodes();
    const auto it = std::upper_bound(nodes.begin(), nodes.end(), xi);
    if (it == nodes.begin()) throw domain_error("Polytrope: xi below the integration start");
    return static_cast<std::size_t>(it - nodes.begin()) - 1;
  }

  ThetaPair step_from(std::size_t i, double xi) const {
    const double t = profile_.nodes()[i];
    if (xi == t) return {profile_.state(i)[0], profile_.state(i)[1]};
    auto rhs = lane_emden_rhs(n());
    const auto s = detail::dp5_step<2>(rhs, t, profile_.state(i), profile_.derivative(i), xi - t);
    return {s.y[0], s.y[1]};
  }

  PolytropeIndex index_;
  double xi_start_;
  DenseTrajectory<2> profile_;
  double xi_n_;
  double slope_;
};

/// Integrate the Lane-Emden system to its first zero.
inline Polytrope solve_polytrope(PolytropeIndex index, const Tolerances& tol = {}) {
  if (!index.has_finite_radius()) {
    throw domain_error(
        "solve_polytrope: n = 5 has no finite first zero; use the closed form (theta_closed_form) or "
        "the n -> 5 asymptotics");
  }
  const double n = index.value();
  const ThetaPair start = series_start(index, kSeriesRadius);

  auto rhs = lane_emden_rhs(n);
  auto event = [](double, const State<2>& y) { return y[0]; };

  // xi_n grows like 1/(5 - n); leave generous room.
  const double xi_max = 100.0 + 1e3 / (5.0 - n);
  auto result = integrate_ivp<2>(rhs, State<2>{start.theta, start.dtheta}, kSeriesRadius, xi_max, tol, event);
  if (!result.event) {
    throw budget_error("solve_polytrope: no zero found before xi = " + std::to_string(xi_max));
  }
  const double xi_n = *result.event;
  const double slope = result.trajectory.state(result.trajectory.size() - 1)[1];
  if (!(slope < 0.0)) throw consistency_error("solve_polytrope: non-negative slope at the first zero");
  return Polytrope(index, kSeriesRadius, std::move(result.trajectory), xi_n, slope);
}

/// Integral of theta^(n+1) r^2 over [0, xi_n].
inline double mass_integral(const Polytrope& p, const Tolerances& tol = {}) {
  const double n = p.n();
  auto integrand = [&](double r) {
    const double th = std::max(p.theta(r), 0.0);
    return std::pow(th, n + 1.0) * r * r;
  };
  Tolerances q = tol;
  q.abs = 0.0;
  return integrate_adaptive(integrand, 0.0, p.first_zero(), q);
}

/// Profile dump at integrator nodes: header `xi,theta,dtheta`.
inline void write_profile_csv(std::ostream& os, const Polytrope& p) {
  char buf[96];
  os << "xi,theta,dtheta\n";
  const auto& traj = p.profile();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const auto& s = traj.state(i);
    std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", traj.nodes()[i], s[0], s[1]);
    os << buf;
  }
}

}  // namespace vpcrit
