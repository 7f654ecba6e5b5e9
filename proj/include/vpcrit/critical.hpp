#pragma once

// Closed-form algebra from beta to the critical constant C_beta.
//
// For 3/2 < beta < infinity the minimiser is a rescaled Lane-Emden polytrope
// of index n(beta) = (3 beta - 2)/(beta - 1), and
//
//   C_beta = (beta / (R_beta (2 beta - 3)))^(1/beta),
//   R_beta = xi_n (-xi_n^2 theta_n'(xi_n))^(1 - 2 beta) c(beta)^(beta - 1).
//
// Products such as c(beta)^(beta-1) overflow double precision long before
// beta gets large, so radii and rescaling dilations are carried as logs.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vpcrit/errors.hpp"
#include "vpcrit/numerics.hpp"
#include "vpcrit/polytrope.hpp"

namespace vpcrit {

/// The exponent beta of the L^beta norm: a finite real or infinity.
class BetaExponent {
 public:
  static BetaExponent finite(double beta) {
    if (!std::isfinite(beta)) throw domain_error("beta must be finite; use BetaExponent::infinity()");
    return BetaExponent(beta, false);
  }
  static BetaExponent infinity() { return BetaExponent(0.0, true); }

  /// Accepts a decimal number or one of "inf", "infinity" (any case, optional '+').
  static BetaExponent parse(std::string_view text) {
    std::string lower;
    for (char ch : text) {
      if (ch != ' ') lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
    if (!lower.empty() && lower.front() == '+') lower.erase(lower.begin());
    if (lower == "inf" || lower == "infinity") return infinity();
    double value = 0.0;
    const char* first = lower.data();
    const char* last = lower.data() + lower.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (lower.empty() || ec != std::errc() || ptr != last) {
      throw domain_error("cannot parse beta from '" + std::string(text) + "'");
    }
    if (std::isinf(value)) return infinity();
    return finite(value);
  }

  bool is_infinite() const noexcept { return infinite_; }
  double value() const {
    if (infinite_) throw domain_error("beta is infinite");
    return beta_;
  }
  std::string to_string() const {
    if (infinite_) return "inf";
    char buf[32];
    for (int digits = 15; digits <= 17; ++digits) {
      std::snprintf(buf, sizeof buf, "%.*g", digits, beta_);
      if (std::strtod(buf, nullptr) == beta_) break;
    }
    return buf;
  }

 private:
  BetaExponent(double beta, bool infinite) : beta_(beta), infinite_(infinite) {}
  double beta_;
  bool infinite_;
};

/// Betas below this use the near-critical asymptotics instead of a direct
/// Lane-Emden solve (xi_n grows like 1/(2 beta - 3)).
inline constexpr double kAsymptoticThreshold = 1.505;

/// n(beta) = (3 beta - 2)/(beta - 1); 3 at beta = infinity.
inline double n_of_beta(BetaExponent beta) {
  if (beta.is_infinite()) return 3.0;
  const double b = beta.value();
  if (!(b > 1.0)) throw domain_error("n_of_beta: beta must exceed 1");
  return (3.0 * b - 2.0) / (b - 1.0);
}

/// beta(n) = (n - 2)/(n - 3) for 3 < n <= 5; n = 3 maps to infinity.
inline BetaExponent beta_of_n(double n) {
  if (n == 3.0) return BetaExponent::infinity();
  if (!(n > 3.0 && n <= 5.0)) throw domain_error("beta_of_n: index must lie in [3, 5]");
  return BetaExponent::finite((n - 2.0) / (n - 3.0));
}

/// c(beta) = 32 pi^2 (beta-1)^3 / (beta (2beta-1) (3beta-2)); 16 pi^2/3 at infinity.
inline double c_of_beta(BetaExponent beta) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (beta.is_infinite()) return 16.0 * pi2 / 3.0;
  const double b = beta.value();
  if (!(b > 1.0)) throw domain_error("c_of_beta: beta must exceed 1");
  const double bm1 = b - 1.0;
  return 32.0 * pi2 * bm1 * bm1 * bm1 / (b * (2.0 * b - 1.0) * (3.0 * b - 2.0));
}

struct ScalingConstants {
  double n = 0.0;
  double c_beta = 0.0;
  double alpha_n = 0.0;     // c^(1/(n-1))
  double log_A_n = 0.0;     // log of the dilation A_n = (P / alpha_n)^(2 beta - 1)
  double A_n = 0.0;         // may underflow to 0 for large beta
  double log_R_beta = 0.0;  // log of the support radius xi_n / A_n
  double R_beta = 0.0;      // may overflow to inf for large beta
};

namespace detail {

inline void require_generic_beta(BetaExponent beta, const char* who) {
  if (beta.is_infinite()) {
    throw domain_error(std::string(who) + ": beta = infinity is handled by critical_at_infinity");
  }
  if (!(beta.value() > 1.5)) throw domain_error(std::string(who) + ": requires beta > 3/2");
}

inline void require_matching_index(BetaExponent beta, const Polytrope& p, const char* who) {
  const double n = n_of_beta(beta);
  if (std::abs(p.n() - n) > 1e-12 * n) {
    throw consistency_error(std::string(who) + ": polytrope index " + std::to_string(p.n()) +
                            " does not match n(beta) = " + std::to_string(n));
  }
}

}  // namespace detail

/// log R_beta straight from the Lane-Emden data (xi_n, -xi_n^2 theta'(xi_n)).
inline double log_radius_from_lane_emden(BetaExponent beta, double xi_n, double slope_product) {
  detail::require_generic_beta(beta, "log_radius_from_lane_emden");
  const double b = beta.value();
  return std::log(xi_n) + (1.0 - 2.0 * b) * std::log(slope_product) + (b - 1.0) * std::log(c_of_beta(beta));
}

/// Rescaling constants turning theta_n into the minimiser potential
/// phi(r) = alpha^-1 A^(2/(n-1)) theta_n(A r).
///
/// A_n follows from matching phi'(R) = -1/R^2 at R = xi_n / A_n, which gives
/// A^((3-n)/(n-1)) = alpha / P, i.e. A = (P/alpha)^(2 beta - 1).
inline ScalingConstants scaling_constants(BetaExponent beta, const Polytrope& p) {
  detail::require_generic_beta(beta, "scaling_constants");
  detail::require_matching_index(beta, p, "scaling_constants");
  const double b = beta.value();
  ScalingConstants s;
  s.n = n_of_beta(beta);
  s.c_beta = c_of_beta(beta);
  const double log_alpha = std::log(s.c_beta) / (s.n - 1.0);
  s.alpha_n = std::exp(log_alpha);
  s.log_A_n = (2.0 * b - 1.0) * (std::log(p.slope_product()) - log_alpha);
  s.A_n = std::exp(s.log_A_n);
  s.log_R_beta = std::log(p.first_zero()) - s.log_A_n;
  s.R_beta = std::exp(s.log_R_beta);
  return s;
}

/// Both routes to C_beta: through the support radius of the rescaled profile,
/// and directly from (beta, xi_n, theta_n'(xi_n)) via the expanded formula.
struct CriticalConstantRoutes {
  double via_radius;
  double via_lane_emden;
};

inline CriticalConstantRoutes critical_constant_routes(BetaExponent beta, const Polytrope& p) {
  const ScalingConstants s = scaling_constants(beta, p);
  const double b = beta.value();
  const double log_simple = (std::log(b) - s.log_R_beta - std::log(2.0 * b - 3.0)) / b;
  const double log_expanded = (std::log(b) + (2.0 * b - 1.0) * std::log(p.slope_product()) -
                               std::log(2.0 * b - 3.0) - std::log(p.first_zero()) -
                               (b - 1.0) * std::log(s.c_beta)) /
                              b;
  return {std::exp(log_simple), std::exp(log_expanded)};
}

/// Relative agreement demanded between the two routes.
inline constexpr double kRouteAgreement = 1e-10;

inline double critical_constant(BetaExponent beta, const Polytrope& p) {
  const auto routes = critical_constant_routes(beta, p);
  const double gap = std::abs(routes.via_radius - routes.via_lane_emden) / routes.via_lane_emden;
  if (!(gap <= kRouteAgreement)) {
    throw consistency_error("critical_constant: formula routes disagree (relative gap " +
                            std::to_string(gap) + ")");
  }
  return routes.via_lane_emden;
}

/// Closed-form value at beta = 3/2: (3/8)(15/16)^(1/3).
inline double critical_at_three_halves() { return 0.375 * std::cbrt(15.0 / 16.0); }

/// C_infinity = 3 (-xi_3^2 theta_3'(xi_3))^2 / (16 pi^2).
inline double critical_at_infinity(const Polytrope& p3) {
  if (p3.n() != 3.0) {
    throw consistency_error("critical_at_infinity: needs the n = 3 polytrope, got n = " +
                            std::to_string(p3.n()));
  }
  const double P = p3.slope_product();
  return 3.0 * P * P / (16.0 * std::numbers::pi * std::numbers::pi);
}

struct KzBounds {
  double lower;
  double upper;
};

/// Lower bound [(3/8)^3 (15/16)]^(1 - 1/beta).
inline double kz_lower(double beta) { return std::pow(405.0 / 8192.0, 1.0 - 1.0 / beta); }

/// Upper bound (45/8pi^2) (8 pi^(5/2) Gamma(beta) / (prod_{k=1..3}(k+2beta) Gamma(beta+3/2)))^(1/beta).
inline double kz_upper(double beta) {
  constexpr double pi = std::numbers::pi;
  const double prefactor = 45.0 / (8.0 * pi * pi);
  const double log_inner = std::log(8.0) + 2.5 * std::log(pi) + std::lgamma(beta) - std::lgamma(beta + 1.5) -
                           std::log((1.0 + 2.0 * beta) * (2.0 + 2.0 * beta) * (3.0 + 2.0 * beta));
  return prefactor * std::exp(log_inner / beta);
}

inline KzBounds bounds_kz(BetaExponent beta) {
  if (beta.is_infinite()) {
    return {405.0 / 8192.0, 45.0 / (8.0 * std::numbers::pi * std::numbers::pi)};
  }
  const double b = beta.value();
  if (!(b >= 1.5)) throw domain_error("bounds_kz: requires beta >= 3/2");
  return {kz_lower(b), kz_upper(b)};
}

/// Convex-hull improvement of the upper bound.
///
/// Beyond its minimiser beta* the upper bound increases while C_beta keeps
/// decreasing, so the curve is replaced by its minimum from beta* on, and the
/// lower convex envelope of the result (monotone chain on the grid points plus
/// beta*) is taken. Between hull vertices the value is the smaller of the hull
/// chord and the flattened curve.
class ImprovedUpperBound {
 public:
  explicit ImprovedUpperBound(std::span<const double> betas) : grid_(betas.begin(), betas.end()) {
    if (grid_.size() < 200) {
      throw resolution_error("improved_upper_bound: need at least 200 grid points, got " +
                             std::to_string(grid_.size()));
    }
    if (!std::is_sorted(grid_.begin(), grid_.end()) ||
        std::adjacent_find(grid_.begin(), grid_.end()) != grid_.end()) {
      throw resolution_error("improved_upper_bound: grid must be strictly increasing");
    }
    if (std::abs(grid_.front() - 1.5) > 1e-12 || grid_.back() < 10.0) {
      throw resolution_error("improved_upper_bound: grid must span [3/2, beta_max >= 10]");
    }

    std::vector<double> values(grid_.size());
    std::transform(grid_.begin(), grid_.end(), values.begin(), kz_upper);
    const auto i_min = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    const double lo = grid_[i_min == 0 ? 0 : i_min - 1];
    const double hi = grid_[std::min(i_min + 1, grid_.size() - 1)];
    onset_ = (lo < hi) ? minimize_golden(kz_upper, lo, hi, 1e-10) : grid_[i_min];
    plateau_ = std::min(kz_upper(onset_), values[i_min]);

    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      if (grid_[i] < onset_) pts.emplace_back(grid_[i], values[i]);
    }
    pts.emplace_back(onset_, plateau_);
    for (double b : grid_) {
      if (b > onset_) pts.emplace_back(b, plateau_);
    }
    // Andrew's monotone chain, lower half.
    for (const auto& p : pts) {
      while (hull_.size() >= 2) {
        const auto& a = hull_[hull_.size() - 2];
        const auto& o = hull_.back();
        const double cross = (o.first - a.first) * (p.second - a.second) - (o.second - a.second) * (p.first - a.first);
        if (cross <= 0.0) {
          hull_.pop_back();
        } else {
          break;
        }
      }
      hull_.push_back(p);
    }

    grid_values_.reserve(grid_.size());
    for (double b : grid_) grid_values_.push_back((*this)(b));
  }

  /// Minimiser of the original upper bound (start of the plateau).
  double onset() const noexcept { return onset_; }
  double plateau() const noexcept { return plateau_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  const std::vector<double>& grid_values() const noexcept { return grid_values_; }

  double operator()(double beta) const {
    if (!(beta >= 1.5)) throw domain_error("improved upper bound: requires beta >= 3/2");
    const double flattened = beta < onset_ ? kz_upper(beta) : plateau_;
    if (beta >= hull_.back().first) return std::min(flattened, hull_.back().second);
    auto it = std::upper_bound(hull_.begin(), hull_.end(), beta,
                               [](double x, const std::pair<double, double>& p) { return x < p.first; });
    if (it == hull_.begin()) return flattened;
    const auto& right = *it;
    const auto& left = *(it - 1);
    const double w = (beta - left.first) / (right.first - left.first);
    const double chord = left.second + w * (right.second - left.second);
    return std::min(chord, flattened);
  }

  double operator()(BetaExponent beta) const {
    return beta.is_infinite() ? plateau_ : (*this)(beta.value());
  }

 private:
  std::vector<double> grid_;
  std::vector<double> grid_values_;
  std::vector<std::pair<double, double>> hull_;
  double onset_ = 0.0;
  double plateau_ = 0.0;
};

/// Improved bound evaluated on the given grid.
inline std::vector<double> improved_upper_bound(std::span<const double> betas) {
  return ImprovedUpperBound(betas).grid_values();
}

/// 3/2 followed by `points - 1` values uniform in log(beta - 3/2) up to beta_max.
inline std::vector<double> default_bound_grid(double beta_max = 50.0, std::size_t points = 400) {
  std::vector<double> g{1.5};
  const double lo = std::log(1e-6), hi = std::log(beta_max - 1.5);
  for (std::size_t i = 0; i + 1 < points; ++i) {
    g.push_back(1.5 + std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 2)));
  }
  g.back() = beta_max;
  return g;
}

/// Near n = 5: xi_n ~ 16 (n + 1) / (pi sqrt(3) (5 - n)).
inline double asymptotic_first_zero(double n) {
  if (!(n < 5.0)) throw domain_error("asymptotic_first_zero: requires n < 5");
  return 16.0 * (n + 1.0) / (std::numbers::pi * std::numbers::sqrt3 * (5.0 - n));
}

/// R_beta ~ (16/3pi) ((4beta-3)/(2beta-3)) (c(beta)/3)^(beta-1) near beta = 3/2.
inline double asymptotic_radius(BetaExponent beta) {
  if (beta.is_infinite() || !(beta.value() > 1.5)) {
    throw domain_error("asymptotic_radius: requires finite beta > 3/2");
  }
  const double b = beta.value();
  return 16.0 / (3.0 * std::numbers::pi) * (4.0 * b - 3.0) / (2.0 * b - 3.0) *
         std::pow(c_of_beta(beta) / 3.0, b - 1.0);
}

/// C_beta ~ [3pi/16 (beta/(4beta-3))]^(1/beta) (3/c(beta))^(1-1/beta); exact at beta = 3/2.
inline double asymptotic_critical(BetaExponent beta) {
  if (beta.is_infinite() || !(beta.value() >= 1.5)) {
    throw domain_error("asymptotic_critical: requires finite beta >= 3/2");
  }
  const double b = beta.value();
  return std::pow(3.0 * std::numbers::pi / 16.0 * (b / (4.0 * b - 3.0)), 1.0 / b) *
         std::pow(3.0 / c_of_beta(beta), 1.0 - 1.0 / b);
}

enum class Source { exact, asymptotic, endpoint };

inline const char* to_string(Source s) {
  switch (s) {
    case Source::exact: return "exact";
    case Source::asymptotic: return "asymptotic";
    case Source::endpoint: return "endpoint";
  }
  return "?";
}

struct CriticalReport {
  BetaExponent beta = BetaExponent::finite(2.0);
  ScalingConstants scaling;
  double xi_n = 0.0;
  double slope = 0.0;          // theta_n'(xi_n)
  double slope_product = 0.0;  // -xi_n^2 theta_n'(xi_n)
  double C_beta = 0.0;
  double lower_kz = 0.0;
  double upper_kz = 0.0;
  double upper_improved = 0.0;
  Source source = Source::exact;
};

/// Full computation for one beta >= 3/2.
///
/// beta = 3/2 and beta = infinity are endpoints; 3/2 < beta < 1.505 uses the
/// near-critical asymptotics; everything else solves the Lane-Emden problem.
inline CriticalReport critical_report(BetaExponent beta, const ImprovedUpperBound& improved,
                                      const Tolerances& tol = {}) {
  CriticalReport r;
  r.beta = beta;
  const KzBounds kz = bounds_kz(beta);  // rejects beta < 3/2
  r.lower_kz = kz.lower;
  r.upper_kz = kz.upper;
  r.upper_improved = improved(beta);
  constexpr double inf = std::numeric_limits<double>::infinity();

  if (beta.is_infinite()) {
    const Polytrope p3 = solve_polytrope(PolytropeIndex(3.0), tol);
    r.source = Source::endpoint;
    r.scaling.n = 3.0;
    r.scaling.c_beta = c_of_beta(beta);
    r.scaling.alpha_n = std::sqrt(r.scaling.c_beta);
    r.scaling.log_A_n = -inf;
    r.scaling.A_n = 0.0;
    r.scaling.log_R_beta = inf;
    r.scaling.R_beta = inf;
    r.xi_n = p3.first_zero();
    r.slope = p3.slope_at_zero();
    r.slope_product = p3.slope_product();
    r.C_beta = critical_at_infinity(p3);
    return r;
  }

  const double b = beta.value();
  if (b == 1.5) {
    r.source = Source::endpoint;
    r.scaling.n = 5.0;
    r.scaling.c_beta = c_of_beta(beta);
    r.scaling.alpha_n = std::pow(r.scaling.c_beta, 0.25);
    r.scaling.log_A_n = 2.0 * (0.5 * std::log(3.0) - std::log(r.scaling.alpha_n));
    r.scaling.A_n = std::exp(r.scaling.log_A_n);
    r.scaling.log_R_beta = inf;
    r.scaling.R_beta = inf;
    r.xi_n = inf;
    r.slope = 0.0;
    r.slope_product = std::numbers::sqrt3;
    r.C_beta = critical_at_three_halves();
    return r;
  }

  if (b < kAsymptoticThreshold) {
    r.source = Source::asymptotic;
    const double n = n_of_beta(beta);
    r.scaling.n = n;
    r.scaling.c_beta = c_of_beta(beta);
    r.scaling.alpha_n = std::pow(r.scaling.c_beta, 1.0 / (n - 1.0));
    r.scaling.R_beta = asymptotic_radius(beta);
    r.scaling.log_R_beta = std::log(r.scaling.R_beta);
    r.xi_n = asymptotic_first_zero(n);
    r.slope_product = std::numbers::sqrt3;
    r.slope = -r.slope_product / (r.xi_n * r.xi_n);
    r.scaling.log_A_n = std::log(r.xi_n) - r.scaling.log_R_beta;
    r.scaling.A_n = std::exp(r.scaling.log_A_n);
    r.C_beta = asymptotic_critical(beta);
    return r;
  }

  const Polytrope p = solve_polytrope(PolytropeIndex(n_of_beta(beta)), tol);
  r.source = Source::exact;
  r.scaling = scaling_constants(beta, p);
  r.xi_n = p.first_zero();
  r.slope = p.slope_at_zero();
  r.slope_product = p.slope_product();
  r.C_beta = critical_constant(beta, p);
  return r;
}

inline CriticalReport critical_report(BetaExponent beta, const Tolerances& tol = {}) {
  static const ImprovedUpperBound improved(default_bound_grid());
  return critical_report(beta, improved, tol);
}

}  // namespace vpcrit
