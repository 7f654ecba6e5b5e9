#pragma once

// Independent quadrature checks on the reconstructed minimiser.
//
// With n = (3beta-2)/(beta-1) the minimiser potential is
//   phi(r) = alpha^-1 A^(2/(n-1)) theta_n(A r)   on [0, R],   1/r - 1/R outside,
// and its spatial density is rho = 8pi(beta-1)^3/(beta(2beta-1)(3beta-2)) phi_+^n.
// The momentum integrals are done in closed form, so every functional reduces
// to a radial integral of a power of phi.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "vpcrit/critical.hpp"
#include "vpcrit/errors.hpp"
#include "vpcrit/numerics.hpp"
#include "vpcrit/polytrope.hpp"

namespace vpcrit {

class MinimizerProfile;
MinimizerProfile build_minimizer_profile(BetaExponent beta, Polytrope p, const ScalingConstants& s);

class MinimizerProfile {
 public:
  double beta() const noexcept { return beta_; }
  const ScalingConstants& scaling() const noexcept { return scaling_; }
  const Polytrope& polytrope() const noexcept { return poly_; }
  double support_radius() const noexcept { return scaling_.R_beta; }
  double exponent() const noexcept { return scaling_.n; }
  /// phi(0) = alpha^-1 A^(2/(n-1)).
  double central_value() const noexcept { return phi0_; }
  double density_coefficient() const noexcept { return rho_coef_; }

  double phi(double r) const {
    check_radius(r);
    if (r > support_radius()) return 1.0 / r - 1.0 / support_radius();
    return phi0_ * poly_.theta(scaling_.A_n * r);
  }

  double dphi(double r) const {
    check_radius(r);
    if (r > support_radius()) return -1.0 / (r * r);
    return phi0_ * scaling_.A_n * poly_.evaluate(scaling_.A_n * r).dtheta;
  }

  /// Second derivative, from a difference quotient of locally re-integrated
  /// theta' (inside the series radius, from the series).
  double d2phi(double r) const {
    check_radius(r);
    if (r > support_radius()) return 2.0 / (r * r * r);
    const double xi = scaling_.A_n * r;
    const double scale = phi0_ * scaling_.A_n * scaling_.A_n;
    if (xi <= poly_.series_radius()) {
      const double n = scaling_.n, x2 = xi * xi;
      return scale * (-1.0 / 3.0 + x2 * (n / 10.0 - x2 * n * (8.0 * n - 5.0) / 504.0));
    }
    return scale * poly_.curvature(std::min(xi, poly_.first_zero() * (1.0 - 1e-12)));
  }

  double rho(double r) const {
    check_radius(r);
    if (r >= support_radius()) return 0.0;
    return rho_coef_ * std::pow(std::max(phi(r), 0.0), scaling_.n);
  }

 private:
  friend MinimizerProfile build_minimizer_profile(BetaExponent, Polytrope, const ScalingConstants&);
  MinimizerProfile(double beta, Polytrope p, const ScalingConstants& s)
      : beta_(beta), scaling_(s), poly_(std::move(p)) {
    phi0_ = std::exp(-std::log(s.alpha_n) + 2.0 / (s.n - 1.0) * s.log_A_n);
    const double b = beta;
    rho_coef_ = 8.0 * std::numbers::pi * std::pow(b - 1.0, 3) / (b * (2.0 * b - 1.0) * (3.0 * b - 2.0));
  }

  static void check_radius(double r) {
    if (!(r >= 0.0)) throw domain_error("minimizer profile: radius must be non-negative");
  }

  double beta_;
  ScalingConstants scaling_;
  Polytrope poly_;
  double phi0_ = 0.0;
  double rho_coef_ = 0.0;
};

inline MinimizerProfile build_minimizer_profile(BetaExponent beta, Polytrope p, const ScalingConstants& s) {
  detail::require_generic_beta(beta, "build_minimizer_profile");
  detail::require_matching_index(beta, p, "build_minimizer_profile");
  const ScalingConstants expected = scaling_constants(beta, p);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * std::max(std::abs(a), std::abs(b)); };
  if (!close(s.n, expected.n) || !close(s.c_beta, expected.c_beta) || !close(s.alpha_n, expected.alpha_n) ||
      !close(s.log_A_n, expected.log_A_n) || !close(s.log_R_beta, expected.log_R_beta)) {
    throw consistency_error("build_minimizer_profile: scaling constants do not match (beta, polytrope)");
  }
  if (!std::isfinite(s.R_beta) || !(s.A_n > 0.0)) {
    throw domain_error("build_minimizer_profile: support radius exp(" + std::to_string(s.log_R_beta) +
                       ") is not representable in double precision");
  }
  return MinimizerProfile(beta.value(), std::move(p), s);
}

namespace detail {

inline Tolerances relative_only(const Tolerances& tol) {
  Tolerances q = tol;
  q.abs = 0.0;
  return q;
}

/// 4 pi int_0^R g(r) r^2 dr.
template <class G>
double radial_integral(const MinimizerProfile& m, G&& g, const Tolerances& tol) {
  auto integrand = [&](double r) { return g(r) * r * r; };
  return 4.0 * std::numbers::pi * integrate_adaptive(integrand, 0.0, m.support_radius(), relative_only(tol));
}

/// 4 pi int_0^R phi^((4beta-3)/(beta-1)) r^2 dr, shared by three checks.
inline double phi_power_integral(const MinimizerProfile& m, const Tolerances& tol) {
  const double b = m.beta();
  const double q = (4.0 * b - 3.0) / (b - 1.0);
  return radial_integral(m, [&](double r) { return std::pow(std::max(m.phi(r), 0.0), q); }, tol);
}

inline double relative_gap(double value, double target) { return std::abs(value - target) / std::abs(target); }

}  // namespace detail

/// Shell formula K(r) = (4pi/r) int_0^r rho s^2 ds + 4pi int_r^R rho s ds.
inline double potential_K(const MinimizerProfile& m, double r, const Tolerances& tol = {}) {
  if (!(r > 0.0)) throw domain_error("potential_K: radius must be positive");
  const Tolerances q = detail::relative_only(tol);
  const double R = m.support_radius();
  const double inner_end = std::min(r, R);
  const double inner = integrate_adaptive([&](double s) { return m.rho(s) * s * s; }, 0.0, inner_end, q);
  const double outer = r < R ? integrate_adaptive([&](double s) { return m.rho(s) * s; }, r, R, q) : 0.0;
  return 4.0 * std::numbers::pi * (inner / r + outer);
}

inline double check_mass(const MinimizerProfile& m, const Tolerances& tol = {}) {
  return std::abs(detail::radial_integral(m, [&](double r) { return m.rho(r); }, tol) - 1.0);
}

/// 1/R (beta/(2beta-3)), the value of ||f||_beta^beta.
inline double lbeta_target(const MinimizerProfile& m) {
  const double b = m.beta();
  return b / (m.support_radius() * (2.0 * b - 3.0));
}

/// (3beta-3)/(R(2beta-3)), the common value of the kinetic and potential energies.
inline double energy_target(const MinimizerProfile& m) {
  const double b = m.beta();
  return 3.0 * (b - 1.0) / (m.support_radius() * (2.0 * b - 3.0));
}

inline double lbeta_norm_value(const MinimizerProfile& m, const Tolerances& tol = {}) {
  const double b = m.beta();
  const double coef = 8.0 * std::numbers::pi * std::pow(b - 1.0, 3) /
                      ((2.0 * b - 1.0) * (3.0 * b - 2.0) * (4.0 * b - 3.0));
  return coef * detail::phi_power_integral(m, tol);
}

inline double check_lbeta_norm(const MinimizerProfile& m, const Tolerances& tol = {}) {
  return detail::relative_gap(lbeta_norm_value(m, tol), lbeta_target(m));
}

inline double check_kinetic(const MinimizerProfile& m, const Tolerances& tol = {}) {
  const double b = m.beta();
  const double coef = 24.0 * std::numbers::pi * std::pow(b - 1.0, 4) /
                      (b * (2.0 * b - 1.0) * (3.0 * b - 2.0) * (4.0 * b - 3.0));
  return detail::relative_gap(coef * detail::phi_power_integral(m, tol), energy_target(m));
}

inline double check_potential(const MinimizerProfile& m, const Tolerances& tol = {}) {
  const double value =
      0.5 * detail::radial_integral(m, [&](double r) { return r > 0.0 ? m.rho(r) * potential_K(m, r, tol) : 0.0; }, tol);
  return detail::relative_gap(value, energy_target(m));
}

inline double check_pohozaev(const MinimizerProfile& m, const Tolerances& tol = {}) {
  const double b = m.beta();
  const double target = 4.0 * std::numbers::pi / m.support_radius() * (4.0 * b - 3.0) / (2.0 * b - 3.0);
  const double dirichlet = detail::radial_integral(m, [&](double r) { const double d = m.dphi(r); return d * d; }, tol);
  const double nonlinear = m.scaling().c_beta * detail::phi_power_integral(m, tol);
  return std::max(detail::relative_gap(dirichlet, target), detail::relative_gap(nonlinear, target));
}

/// max |K(r) - 1/r| r over radii at or beyond R; an empty list samples R, 2R and 10R.
inline double check_exterior(const MinimizerProfile& m, const std::vector<double>& radii = {},
                             const Tolerances& tol = {}) {
  const double R = m.support_radius();
  const std::vector<double> samples = radii.empty() ? std::vector<double>{R, 2.0 * R, 10.0 * R} : radii;
  double worst = 0.0;
  for (double r : samples) {
    if (!(r >= R)) throw domain_error("check_exterior: sample radius inside the support");
    worst = std::max(worst, std::abs(potential_K(m, r, tol) * r - 1.0));
  }
  return worst;
}

/// |phi'(R) R^2 + 1|.
inline double check_boundary_condition(const MinimizerProfile& m) {
  const double R = m.support_radius();
  return std::abs(m.dphi(R) * R * R + 1.0);
}

/// Largest |phi'' + (2/r) phi' + c phi^n| / (c phi^n) over the radii.
inline double ode_residual(const MinimizerProfile& m, const std::vector<double>& radii) {
  double worst = 0.0;
  const double c = m.scaling().c_beta;
  for (double r : radii) {
    if (!(r > 0.0 && r < m.support_radius())) throw domain_error("ode_residual: radius outside (0, R)");
    const double source = c * std::pow(std::max(m.phi(r), 0.0), m.exponent());
    worst = std::max(worst, std::abs(m.d2phi(r) + 2.0 / r * m.dphi(r) + source) / source);
  }
  return worst;
}

struct VerificationThresholds {
  double mass = 1e-6;
  double lbeta = 1e-6;
  double kinetic = 1e-6;
  double potential = 1e-5;
  double pohozaev = 1e-6;
  double exterior = 1e-7;
  double bc = 1e-6;

  /// The defaults hold at the default kernel tolerance. A looser relative
  /// tolerance widens each threshold to 100x (potential: 1000x) that tolerance.
  static VerificationThresholds for_tolerance(const Tolerances& tol) {
    VerificationThresholds th;
    const double single = 100.0 * tol.rel;
    th.mass = std::max(th.mass, single);
    th.lbeta = std::max(th.lbeta, single);
    th.kinetic = std::max(th.kinetic, single);
    th.potential = std::max(th.potential, 10.0 * single);
    th.pohozaev = std::max(th.pohozaev, single);
    th.exterior = std::max(th.exterior, single);
    th.bc = std::max(th.bc, single);
    return th;
  }
};

struct ResidualCheck {
  std::string name;
  double residual;
  double threshold;
  bool pass;
};

struct VerificationReport {
  double beta = 0.0;
  std::vector<ResidualCheck> checks;
  bool pass = false;

  double residual(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return c.residual;
    }
    throw domain_error("VerificationReport: no check named " + name);
  }
  /// First failing check, or nullptr.
  const ResidualCheck* first_failure() const {
    for (const auto& c : checks) {
      if (!c.pass) return &c;
    }
    return nullptr;
  }
};

inline VerificationReport verify_profile(const MinimizerProfile& m, const Tolerances& tol = {},
                                         const VerificationThresholds& th = {}) {
  VerificationReport rep;
  rep.beta = m.beta();
  auto add = [&](const char* name, double residual, double threshold) {
    rep.checks.push_back({name, residual, threshold, std::isfinite(residual) && residual < threshold});
  };
  add("mass", check_mass(m, tol), th.mass);
  add("lbeta", check_lbeta_norm(m, tol), th.lbeta);
  add("kinetic", check_kinetic(m, tol), th.kinetic);
  add("potential", check_potential(m, tol), th.potential);
  add("pohozaev", check_pohozaev(m, tol), th.pohozaev);
  add("exterior", check_exterior(m, {}, tol), th.exterior);
  add("bc", check_boundary_condition(m), th.bc);
  rep.pass = std::all_of(rep.checks.begin(), rep.checks.end(), [](const ResidualCheck& c) { return c.pass; });
  return rep;
}

/// Solve, rescale and check. Valid for 1.505 <= beta < infinity.
inline VerificationReport run_full_verification(BetaExponent beta, const Tolerances& tol,
                                                const VerificationThresholds& th) {
  if (beta.is_infinite()) throw domain_error("verification needs finite beta (the support radius is infinite)");
  const double b = beta.value();
  if (b < 1.5) {
    throw domain_error("beta = " + beta.to_string() +
                       " < 3/2: outside validity, C_beta = 0 and there is no minimiser to verify");
  }
  if (b < kAsymptoticThreshold) {
    throw domain_error("beta = " + beta.to_string() + " below 1.505: no direct Lane-Emden solve to verify");
  }
  tol.validate();
  Polytrope p = solve_polytrope(PolytropeIndex(n_of_beta(beta)), tol);
  const ScalingConstants s = scaling_constants(beta, p);
  const MinimizerProfile m = build_minimizer_profile(beta, std::move(p), s);
  return verify_profile(m, tol, th);
}

inline VerificationReport run_full_verification(BetaExponent beta, const Tolerances& tol = {}) {
  return run_full_verification(beta, tol, VerificationThresholds::for_tolerance(tol));
}

}  // namespace vpcrit
