#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "cli.hpp"

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = vpcrit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("vpcrit_test_" + name);
}

double field(const std::string& text, const std::string& key) {
  std::istringstream is(text);
  std::string k, v;
  while (is >> k >> v) {
    if (k == key) return std::stod(v);
  }
  return NAN;
}

}  // namespace

TEST(Cli, PolytropeIndexOne) {
  const auto r = run({"polytrope", "--n", "1"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(field(r.out, "xi_n"), 3.14159265, 1e-8);
  EXPECT_NEAR(field(r.out, "slope"), -0.31830988, 1e-8);
}

TEST(Cli, PolytropeIndexThreeProduct) {
  const auto r = run({"polytrope", "--n", "3"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(field(r.out, "slope_product"), 2.018236, 1e-5);
}

TEST(Cli, PolytropeIndexFiveRefused) {
  const auto r = run({"polytrope", "--n", "5"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("closed form"), std::string::npos);
  EXPECT_EQ(run({"polytrope", "--n", "-1"}).code, 2);
}

TEST(Cli, PolytropeProfileDump) {
  const auto path = temp_path("profile.csv");
  const auto r = run({"polytrope", "--n", "1", "--profile", path.string()});
  EXPECT_EQ(r.code, 0);
  const std::string csv = slurp(path);
  EXPECT_EQ(csv.rfind("xi,theta,dtheta\n", 0), 0u);
  std::filesystem::remove(path);
}

TEST(Cli, CriticalEndpointsAndInterior) {
  EXPECT_NEAR(field(run({"critical", "--beta", "1.5"}).out, "C_beta"), 0.367018841, 1e-9);
  EXPECT_NEAR(field(run({"critical", "--beta", "inf"}).out, "C_beta"), 0.077383, 1e-5);
  const auto two = run({"critical", "--beta", "2"});
  EXPECT_EQ(two.code, 0);
  const double c = field(two.out, "C_beta");
  EXPECT_GE(c, field(two.out, "lower_kz"));
  EXPECT_LE(c, field(two.out, "upper_kz"));
}

TEST(Cli, CriticalBelowThreeHalves) {
  const auto r = run({"critical", "--beta", "1.2"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("3/2"), std::string::npos);
}

TEST(Cli, CriticalNearThreshold) {
  const auto r = run({"critical", "--beta", "1.501"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("asymptotic"), std::string::npos);
}

TEST(Cli, CriticalJson) {
  const auto r = run({"critical", "--beta", "2", "--json"});
  EXPECT_EQ(r.code, 0);
  const auto j = vpcrit::json::parse(r.out);
  EXPECT_EQ(j["source"], "exact");
  EXPECT_NEAR(j["C_beta"].get<double>(), 0.242754833, 1e-8);
}

TEST(Cli, VerifyExitCodes) {
  const auto ok = run({"verify", "--beta", "2"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("pass"), std::string::npos);
  EXPECT_EQ(run({"verify", "--beta", "2", "--tol-rel", "1e-4"}).code, 0);
  EXPECT_EQ(run({"verify", "--beta", "1.2"}).code, 2);
  // Near-critical runs at a loose tolerance miss the thresholds.
  const auto fail = run({"verify", "--beta", "1.505", "--tol-rel", "1e-6"});
  EXPECT_EQ(fail.code, 1);
  EXPECT_NE(fail.err.find("verification failed"), std::string::npos);
}

TEST(Cli, SweepToFileIsDeterministic) {
  const auto a = temp_path("sweep_a.csv"), b = temp_path("sweep_b.csv");
  EXPECT_EQ(run({"sweep", "--points", "12", "--out", a.string()}).code, 0);
  EXPECT_EQ(run({"sweep", "--points", "12", "--out", b.string()}).code, 0);
  const std::string sa = slurp(a);
  EXPECT_EQ(sa, slurp(b));
  EXPECT_EQ(sa.rfind("beta,n,xi_n,slope_product,R_beta,C_beta,lower_kz,upper_kz,upper_improved,source\n", 0), 0u);
  EXPECT_EQ(std::count(sa.begin(), sa.end(), '\n'), 13);
  std::filesystem::remove(a);
  std::filesystem::remove(b);
}

TEST(Cli, SweepOptions) {
  EXPECT_EQ(run({"sweep", "--spacing", "linear", "--points", "3", "--beta-min", "1.6", "--beta-max", "2"}).code, 0);
  EXPECT_EQ(run({"sweep", "--spacing", "cubic"}).code, 2);
  EXPECT_EQ(run({"sweep", "--beta-min", "1.4"}).code, 2);
  EXPECT_EQ(run({"sweep", "--points", "1"}).code, 2);
}

TEST(Cli, UnwritablePath) {
  const auto r = run({"sweep", "--points", "3", "--out", "/nonexistent-dir/x.csv"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("cannot open"), std::string::npos);
}

TEST(Cli, Asymptotics) {
  const auto r = run({"asymptotics", "--beta-max", "1.8", "--points", "5"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out.rfind("beta,C_exact,C_asymptotic,rel_gap\n1.5,", 0), 0u);
  EXPECT_EQ(run({"asymptotics", "--beta-max", "1.4"}).code, 2);
}

TEST(Cli, Bounds) {
  const auto r = run({"bounds", "--beta", "inf"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(field(r.out, "lower_kz"), 0.049438, 1e-6);
  EXPECT_NEAR(field(r.out, "upper_improved"), 0.20269, 5e-4);
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"critical"}).code, 2);
  EXPECT_EQ(run({"critical", "--beta", "abc"}).code, 2);
  EXPECT_EQ(run({"critical", "--beta", "2", "--tol-rel", "-1"}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(Cli, NumericalFailureExitCode) {
  const auto r = run({"polytrope", "--n", "3", "--max-steps", "5"});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
  EXPECT_EQ(run({"polytrope", "--n", "3", "--max-steps", "0"}).code, 2);
}
