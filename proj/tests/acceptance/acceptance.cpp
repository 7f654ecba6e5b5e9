// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <vector>

#include "vpcrit/critical.hpp"
#include "vpcrit/polytrope.hpp"
#include "vpcrit/tables.hpp"
#include "vpcrit/verify.hpp"

using namespace vpcrit;

namespace {

int failures = 0;

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

void report(int id, const char* title, bool ok, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", ok ? "PASS" : "FAIL", id, title, detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

template <class Body>
void criterion(int id, const char* title, Body&& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, title, false, std::string("exception: ") + e.what());
  }
}

BetaExponent B(double b) { return BetaExponent::finite(b); }

}  // namespace

int main() {
  constexpr double pi = std::numbers::pi;

  criterion(1, "closed-form polytropes", [] {
    auto t0 = clock_type::now();
    const Polytrope p0 = solve_polytrope(PolytropeIndex(0.0));
    const double t_0 = seconds_since(t0);
    t0 = clock_type::now();
    const Polytrope p1 = solve_polytrope(PolytropeIndex(1.0));
    const double t_1 = seconds_since(t0);
    const double e0 = std::max(std::abs(p0.first_zero() - std::sqrt(6.0)), std::abs(p0.slope_at_zero() + std::sqrt(6.0) / 3));
    const double e1 = std::max(std::abs(p1.first_zero() - pi), std::abs(p1.slope_at_zero() + 1.0 / pi));
    report(1, "closed-form polytropes", e0 <= 1e-8 && e1 <= 1e-8 && t_0 < 0.1 && t_1 < 0.1,
           fmt("n=0 err %.2e, n=1 err %.2e (tol 1e-8); %.4f s, %.4f s (< 0.1 s)", e0, e1, t_0, t_1));
  });

  criterion(2, "n = 3 slope product", [] {
    const auto t0 = clock_type::now();
    const Polytrope p3 = solve_polytrope(PolytropeIndex(3.0));
    const double t = seconds_since(t0);
    const double P = p3.slope_product();
    report(2, "n = 3 slope product", std::abs(P - 2.018236) <= 1e-5 && t < 0.1,
           fmt("-xi_3^2 theta'_3 = %.9f (2.018236 +- 1e-5); %.4f s", P, t));
  });

  criterion(3, "endpoints", [] {
    const double c32 = critical_at_three_halves();
    const bool exact = c32 == 0.375 * std::cbrt(15.0 / 16.0);
    const double cinf = critical_at_infinity(solve_polytrope(PolytropeIndex(3.0)));
    const double c1000 = critical_constant(B(1000.0), solve_polytrope(PolytropeIndex(n_of_beta(B(1000.0)))));
    const double rel = std::abs(c1000 / cinf - 1.0);
    report(3, "endpoints", exact && std::abs(cinf - 0.077383) <= 1e-5 && rel < 0.01,
           fmt("C_3/2 = %.12f (closed form), C_inf = %.8f (0.077383 +- 1e-5), |C_1000/C_inf - 1| = %.2e (< 1%%)", c32,
               cinf, rel));
  });

  criterion(4, "bound sandwich and monotonicity", [] {
    const auto t0 = clock_type::now();
    const auto rows = run_sweep(GridSpec{});
    const double t = seconds_since(t0);
    int sandwich = 0, order = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (!(rows[i].lower_kz <= rows[i].C_beta + 1e-9 && rows[i].C_beta <= rows[i].upper_kz + 1e-9)) ++sandwich;
      if (i > 0 && !(rows[i].C_beta < rows[i - 1].C_beta)) ++order;
    }
    report(4, "bound sandwich and monotonicity", rows.size() == 100 && sandwich == 0 && order == 0 && t < 5.0,
           fmt("%g rows on [1.51, 10], %g sandwich violations, %g monotonicity violations; %.3f s (< 5 s)",
               static_cast<double>(rows.size()), sandwich, order, t));
  });

  criterion(5, "improved bound", [] {
    const ImprovedUpperBound ib(default_bound_grid());
    const bool ok = std::abs(ib.plateau() - 0.20269) <= 5e-4 && std::abs(ib.onset() - 3.6649) <= 0.01;
    report(5, "improved bound", ok,
           fmt("plateau %.6f (0.20269 +- 5e-4), onset %.5f (3.6649 +- 0.01)", ib.plateau(), ib.onset()));
  });

  criterion(6, "identity suite", [] {
    bool ok = true;
    std::string detail;
    const VerificationThresholds th;  // {1e-6, 1e-6, 1e-6, 1e-5, 1e-6, 1e-7, 1e-6}
    for (double b : {1.6, 2.0, 3.0, 10.0}) {
      const auto t0 = clock_type::now();
      const auto rep = run_full_verification(B(b), Tolerances{}, th);
      const double t = seconds_since(t0);
      double worst_ratio = 0.0;
      std::string worst;
      for (const auto& c : rep.checks) {
        if (c.residual / c.threshold >= worst_ratio) {
          worst_ratio = c.residual / c.threshold;
          worst = c.name;
        }
      }
      ok = ok && rep.pass && t < 2.0;
      detail += fmt("beta=%g ", b) + (rep.pass ? "pass" : "FAIL") + fmt(" in %.3f s (worst ", t) + worst +
                fmt(" at %.1e of threshold); ", worst_ratio);
    }
    report(6, "identity suite", ok, detail);
  });

  criterion(7, "dual-formula closure", [] {
    double worst = 0.0;
    int n = 0;
    for (double b : {1.505, 1.51, 1.52, 1.6, 1.75, 2.0, 2.5, 3.0, 4.0, 6.0, 10.0, 20.0, 100.0, 1000.0}) {
      const auto r = critical_constant_routes(B(b), solve_polytrope(PolytropeIndex(n_of_beta(B(b)))));
      worst = std::max(worst, std::abs(r.via_radius / r.via_lane_emden - 1.0));
      ++n;
    }
    for (double b : make_grid(GridSpec{})) {
      const auto r = critical_constant_routes(B(b), solve_polytrope(PolytropeIndex(n_of_beta(B(b)))));
      worst = std::max(worst, std::abs(r.via_radius / r.via_lane_emden - 1.0));
      ++n;
    }
    report(7, "dual-formula closure", worst <= 1e-9, fmt("max relative gap %.2e over %g betas (<= 1e-9)", worst, n));
  });

  criterion(8, "asymptotics", [] {
    const double endpoint = std::abs(asymptotic_critical(B(1.5)) - critical_at_three_halves());
    const double exact = critical_constant(B(1.52), solve_polytrope(PolytropeIndex(n_of_beta(B(1.52)))));
    const double gap = std::abs(asymptotic_critical(B(1.52)) / exact - 1.0);
    report(8, "asymptotics", endpoint <= 1e-12 && gap < 0.05,
           fmt("|asym(3/2) - C_3/2| = %.1e (<= 1e-12), gap at 1.52 = %.3e (< 5%%, baseline 1.52e-3)", endpoint, gap));
  });

  criterion(9, "zero identity", [] {
    double worst = 0.0;
    for (double n : {0.0, 1.0, 2.0, 3.0, 4.0, 4.5}) {
      const Polytrope p = solve_polytrope(PolytropeIndex(n));
      const double lhs = (n + 1.0) / ((5.0 - n) * p.first_zero());
      const double rhs = mass_integral(p) / (p.slope_product() * p.slope_product());
      worst = std::max(worst, std::abs(rhs / lhs - 1.0));
    }
    const double limit = pi * std::sqrt(3.0) / 16.0;
    auto ratio = [](double n) {
      const Polytrope p = solve_polytrope(PolytropeIndex(n));
      return mass_integral(p) / (p.slope_product() * p.slope_product());
    };
    const double g49 = std::abs(ratio(4.9) / limit - 1.0);
    const double g499 = std::abs(ratio(4.99) / limit - 1.0);
    report(9, "zero identity", worst < 1e-7 && g49 < 0.02 && g499 < 0.005,
           fmt("max residual %.2e (< 1e-7); gap to pi*sqrt(3)/16 at n=4.9: %.3e (< 2%%), n=4.99: %.3e (< 0.5%%)", worst,
               g49, g499));
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ALL PASS" : "FAILED", failures);
  return failures == 0 ? 0 : 1;
}
