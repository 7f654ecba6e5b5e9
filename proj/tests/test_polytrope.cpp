#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "vpcrit/polytrope.hpp"

using namespace vpcrit;

namespace {
constexpr double pi = std::numbers::pi;
const double sqrt6 = std::sqrt(6.0);
}  // namespace

TEST(PolytropeIndex, Domain) {
  EXPECT_NO_THROW(PolytropeIndex(0.0));
  EXPECT_NO_THROW(PolytropeIndex(5.0));
  EXPECT_THROW(PolytropeIndex(-0.1), domain_error);
  EXPECT_THROW(PolytropeIndex(5.1), domain_error);
  EXPECT_THROW(PolytropeIndex(NAN), domain_error);
  EXPECT_FALSE(PolytropeIndex(5.0).has_finite_radius());
}

TEST(SolvePolytrope, IndexZero) {
  const Polytrope p = solve_polytrope(PolytropeIndex(0.0));
  EXPECT_NEAR(p.first_zero(), sqrt6, 1e-8);
  EXPECT_NEAR(p.slope_at_zero(), -sqrt6 / 3.0, 1e-8);
}

TEST(SolvePolytrope, IndexOne) {
  const Polytrope p = solve_polytrope(PolytropeIndex(1.0));
  EXPECT_NEAR(p.first_zero(), pi, 1e-8);
  EXPECT_NEAR(p.slope_at_zero(), -1.0 / pi, 1e-8);
}

TEST(SolvePolytrope, IndexThree) {
  const Polytrope p = solve_polytrope(PolytropeIndex(3.0));
  EXPECT_NEAR(p.slope_product(), 2.018236, 1e-5);
  EXPECT_NEAR(p.first_zero(), 6.89685, 1e-4);
  // Tight-tolerance reference values.
  EXPECT_NEAR(p.first_zero(), 6.896848619375754, 1e-8);
  EXPECT_NEAR(p.slope_product(), 2.018235950977546, 1e-8);
}

TEST(SolvePolytrope, ReferenceValues) {
  EXPECT_NEAR(solve_polytrope(PolytropeIndex(4.0)).first_zero(), 14.971546348838167, 1e-7);
  EXPECT_NEAR(solve_polytrope(PolytropeIndex(4.0)).slope_product(), 1.797229914438653, 1e-8);
  EXPECT_NEAR(solve_polytrope(PolytropeIndex(4.5)).first_zero(), 31.83646324469418, 1e-6);
  EXPECT_NEAR(solve_polytrope(PolytropeIndex(4.5)).slope_product(), 1.7377988676659923, 1e-8);
}

TEST(SolvePolytrope, IndexFiveRefused) {
  try {
    solve_polytrope(PolytropeIndex(5.0));
    FAIL() << "expected domain_error";
  } catch (const domain_error& e) {
    EXPECT_NE(std::string(e.what()).find("closed form"), std::string::npos);
  }
}

TEST(SolvePolytrope, ProfileMatchesClosedForms) {
  for (double n : {0.0, 1.0}) {
    const PolytropeIndex idx(n);
    const Polytrope p = solve_polytrope(idx);
    double worst = 0.0;
    const int samples = 2000;
    for (int i = 0; i <= samples; ++i) {
      const double xi = p.series_radius() + (p.first_zero() - p.series_radius()) * i / samples;
      worst = std::max(worst, std::abs(p.theta(xi) - theta_closed_form(idx, xi).theta));
    }
    EXPECT_LE(worst, 1e-8) << "n=" << n;
  }
}

TEST(SolvePolytrope, EvaluateInsideSeriesAndBeyond) {
  const Polytrope p = solve_polytrope(PolytropeIndex(2.0));
  EXPECT_EQ(p.theta(0.0), 1.0);
  EXPECT_NEAR(p.theta(5e-4), 1.0 - 2.5e-7 / 6.0, 1e-15);
  EXPECT_NEAR(p.theta(p.first_zero()), 0.0, 1e-10);
  EXPECT_THROW(p.theta(p.first_zero() * 1.01), domain_error);
  EXPECT_THROW(p.theta(-1.0), domain_error);
}

TEST(SolvePolytrope, CurvatureSatisfiesEquation) {
  const Polytrope p = solve_polytrope(PolytropeIndex(1.5));
  for (double f : {0.1, 0.3, 0.5}) {
    const double xi = f * p.first_zero();
    const auto s = p.refined(xi);
    const double residual = p.curvature(xi) + 2.0 / xi * s.dtheta + std::pow(s.theta, 1.5);
    EXPECT_LT(std::abs(residual), 1e-7 * std::pow(s.theta, 1.5)) << xi;
  }
}

TEST(ThetaClosedForm, Examples) {
  const auto inf = theta_closed_form(PolytropeIndex(5.0), INFINITY);
  EXPECT_EQ(inf.theta, 0.0);
  EXPECT_EQ(inf.dtheta, 0.0);
  const auto far = theta_closed_form(PolytropeIndex(5.0), 1e8);
  EXPECT_LT(far.theta, 1e-7);
  EXPECT_LT(std::abs(far.dtheta), 1e-15);
  const auto zero = theta_closed_form(PolytropeIndex(0.0), sqrt6);
  EXPECT_NEAR(zero.theta, 0.0, 1e-15);
  EXPECT_NEAR(zero.dtheta, -sqrt6 / 3.0, 1e-15);
  const auto origin = theta_closed_form(PolytropeIndex(1.0), 0.0);
  EXPECT_EQ(origin.theta, 1.0);
  EXPECT_EQ(origin.dtheta, 0.0);
  EXPECT_THROW(theta_closed_form(PolytropeIndex(2.0), 1.0), domain_error);
  EXPECT_THROW(theta_closed_form(PolytropeIndex(1.0), -1.0), domain_error);
}

TEST(SeriesStart, MatchesClosedForms) {
  for (double n : {0.0, 1.0, 5.0}) {
    const PolytropeIndex idx(n);
    const auto s = series_start(idx, 1e-3);
    const auto c = theta_closed_form(idx, 1e-3);
    EXPECT_NEAR(s.theta, c.theta, n == 5.0 ? 1e-15 : 1e-16) << n;
    EXPECT_NEAR(s.dtheta, c.dtheta, 1e-15) << n;
  }
  EXPECT_THROW(series_start(PolytropeIndex(1.0), 0.0), domain_error);
  EXPECT_THROW(series_start(PolytropeIndex(1.0), 0.02), domain_error);
}

TEST(MassIntegral, Examples) {
  EXPECT_NEAR(mass_integral(solve_polytrope(PolytropeIndex(0.0))), 4.0 * sqrt6 / 5.0, 1e-10);
  EXPECT_NEAR(mass_integral(solve_polytrope(PolytropeIndex(1.0))), pi / 2.0, 1e-8);
}

TEST(PolytropeProperties, MassRelation) {
  for (double n = 0.0; n <= 4.5; n += 0.5) {
    const Polytrope p = solve_polytrope(PolytropeIndex(n));
    Tolerances q;
    q.abs = 0.0;
    const double m = integrate_adaptive([&](double r) { return std::pow(std::max(p.theta(r), 0.0), n) * r * r; }, 0.0,
                                        p.first_zero(), q);
    EXPECT_NEAR(m / p.slope_product(), 1.0, 1e-8) << "n=" << n;
  }
}

TEST(PolytropeProperties, ZeroIdentity) {
  for (double n = 0.0; n <= 4.5; n += 0.5) {
    const Polytrope p = solve_polytrope(PolytropeIndex(n));
    const double lhs = (n + 1.0) / ((5.0 - n) * p.first_zero());
    const double rhs = mass_integral(p) / (p.slope_product() * p.slope_product());
    EXPECT_NEAR(rhs / lhs, 1.0, 1e-7) << "n=" << n;
  }
}

TEST(PolytropeProperties, FirstZeroIncreasesWithIndex) {
  double prev = 0.0;
  for (double n = 0.0; n <= 4.75; n += 0.25) {
    const double xi = solve_polytrope(PolytropeIndex(n)).first_zero();
    EXPECT_GT(xi, prev) << "n=" << n;
    prev = xi;
  }
}

TEST(ProfileCsv, HeaderAndRows) {
  const Polytrope p = solve_polytrope(PolytropeIndex(1.0));
  std::ostringstream os;
  write_profile_csv(os, p);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "xi,theta,dtheta");
  std::size_t rows = 0;
  while (std::getline(is, line)) ++rows;
  EXPECT_EQ(rows, p.profile().size());
}
