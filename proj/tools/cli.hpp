#pragma once

// vpcrit command-line front end. run() is the whole program; main() only
// forwards argv and the standard streams, so tests can drive it in-process.

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vpcrit/critical.hpp"
#include "vpcrit/errors.hpp"
#include "vpcrit/json_io.hpp"
#include "vpcrit/polytrope.hpp"
#include "vpcrit/tables.hpp"
#include "vpcrit/verify.hpp"

namespace vpcrit::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kUsage = 2, kNumerical = 3 };

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  Tolerances tol;
  GridSpec grid;
  std::string out_path;
  bool json = false;

  void validate() const {
    tol.validate();
    grid.validate();
  }
};

namespace detail {

inline std::string num(double x) { return format_csv_number(x); }

inline void line(std::ostream& os, const char* key, const std::string& value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%-15s ", key);
  os << buf << value << '\n';
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open '" + path + "' for writing");
  f << text;
  f.close();
  if (!f) throw io_error("failed writing '" + path + "'");
}

inline void emit(const RunConfig& cfg, std::ostream& out, const std::string& text) {
  if (cfg.out_path.empty()) {
    out << text;
  } else {
    write_file(cfg.out_path, text);
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

inline BetaExponent parse_critical_beta(const std::string& text) {
  const BetaExponent beta = BetaExponent::parse(text);
  if (!beta.is_infinite() && beta.value() < 1.5) {
    throw domain_error("beta = " + text +
                       " is below 3/2: the critical constant is 0 there (C_beta > 0 if and only if beta >= 3/2)");
  }
  return beta;
}

inline std::string polytrope_text(const Polytrope& p) {
  std::ostringstream os;
  line(os, "n", num(p.n()));
  line(os, "xi_n", num(p.first_zero()));
  line(os, "slope", num(p.slope_at_zero()));
  line(os, "slope_product", num(p.slope_product()));
  return os.str();
}

inline std::string critical_text(const CriticalReport& r) {
  std::ostringstream os;
  line(os, "beta", r.beta.to_string());
  line(os, "source", to_string(r.source));
  line(os, "n", num(r.scaling.n));
  line(os, "xi_n", num(r.xi_n));
  line(os, "slope", num(r.slope));
  line(os, "slope_product", num(r.slope_product));
  line(os, "c_beta", num(r.scaling.c_beta));
  line(os, "alpha_n", num(r.scaling.alpha_n));
  line(os, "log_A_n", num(r.scaling.log_A_n));
  line(os, "log_R_beta", num(r.scaling.log_R_beta));
  line(os, "R_beta", num(r.scaling.R_beta));
  line(os, "C_beta", num(r.C_beta));
  line(os, "lower_kz", num(r.lower_kz));
  line(os, "upper_kz", num(r.upper_kz));
  line(os, "upper_improved", num(r.upper_improved));
  return os.str();
}

inline std::string verification_text(const VerificationReport& rep) {
  std::ostringstream os;
  line(os, "beta", num(rep.beta));
  for (const auto& c : rep.checks) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-10s %.3e  (threshold %.0e)  %s\n", c.name.c_str(), c.residual, c.threshold,
                  c.pass ? "pass" : "FAIL");
    os << buf;
  }
  line(os, "result", rep.pass ? "pass" : "FAIL");
  return os.str();
}

}  // namespace detail

/// Runs the program on `args` (without the program name).
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Critical constants of the attractive relativistic Vlasov-Poisson system", "vpcrit"};
  app.require_subcommand(1);
  app.fallthrough();

  RunConfig cfg;
  app.add_option("--tol-rel", cfg.tol.rel, "Relative tolerance for ODE and quadrature")->capture_default_str();
  app.add_option("--tol-abs", cfg.tol.abs, "Absolute tolerance for the ODE")->capture_default_str();
  app.add_option("--max-steps", cfg.tol.max_steps, "Step budget per integration")->capture_default_str();
  app.add_flag("--json", cfg.json, "Emit JSON instead of text/CSV");
  app.add_option("--out", cfg.out_path, "Write output to this file instead of stdout");

  double poly_n = 0.0;
  std::string profile_path;
  auto* poly = app.add_subcommand("polytrope", "Solve the Lane-Emden equation of index n");
  poly->add_option("--n", poly_n, "Polytropic index in [0, 5)")->required();
  poly->add_option("--profile", profile_path, "Dump xi,theta,dtheta at integrator nodes to this CSV");

  std::string beta_text;
  auto* crit = app.add_subcommand("critical", "Critical constant C_beta with bounds");
  crit->add_option("--beta", beta_text, "beta >= 3/2, or inf")->required();

  auto* sweep = app.add_subcommand("sweep", "Table of C_beta and bounds over a beta grid");
  std::string spacing = "log-offset";
  sweep->add_option("--beta-min", cfg.grid.beta_min)->capture_default_str();
  sweep->add_option("--beta-max", cfg.grid.beta_max)->capture_default_str();
  sweep->add_option("--points", cfg.grid.points)->capture_default_str();
  sweep->add_option("--spacing", spacing)->check(CLI::IsMember({"linear", "log-offset"}))->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Check the identities satisfied by the minimiser");
  verify->add_option("--beta", beta_text, "beta in [1.505, inf)")->required();

  double asym_max = 2.0;
  std::size_t asym_points = 50;
  auto* asym = app.add_subcommand("asymptotics", "Exact versus near-critical asymptotic C_beta");
  asym->add_option("--beta-max", asym_max)->capture_default_str();
  asym->add_option("--points", asym_points)->capture_default_str();

  auto* bounds = app.add_subcommand("bounds", "Lower, upper and improved upper bounds");
  bounds->add_option("--beta", beta_text, "beta >= 3/2, or inf")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    cfg.grid.spacing = spacing == "linear" ? GridSpacing::linear : GridSpacing::log_offset;
    cfg.tol.validate();

    if (poly->parsed()) {
      const Polytrope p = solve_polytrope(PolytropeIndex(poly_n), cfg.tol);
      if (!profile_path.empty()) {
        std::ostringstream csv;
        write_profile_csv(csv, p);
        detail::write_file(profile_path, csv.str());
      }
      detail::emit(cfg, out, cfg.json ? detail::dump(to_json(p)) : detail::polytrope_text(p));
    } else if (crit->parsed()) {
      const CriticalReport r = critical_report(detail::parse_critical_beta(beta_text), cfg.tol);
      detail::emit(cfg, out, cfg.json ? detail::dump(to_json(r)) : detail::critical_text(r));
    } else if (sweep->parsed()) {
      cfg.validate();
      const auto rows = run_sweep(cfg.grid, cfg.tol);
      std::ostringstream os;
      if (cfg.json) {
        os << detail::dump(to_json(rows));
      } else {
        write_sweep_csv(os, rows);
      }
      detail::emit(cfg, out, os.str());
    } else if (verify->parsed()) {
      const VerificationReport rep = run_full_verification(BetaExponent::parse(beta_text), cfg.tol);
      detail::emit(cfg, out, cfg.json ? detail::dump(to_json(rep)) : detail::verification_text(rep));
      if (const auto* f = rep.first_failure()) {
        err << "verification failed: " << f->name << " residual " << f->residual << " exceeds " << f->threshold
            << '\n';
        return kVerificationFailed;
      }
    } else if (asym->parsed()) {
      const auto rows = run_asymptotics(asym_max, asym_points, cfg.tol);
      std::ostringstream os;
      if (cfg.json) {
        os << detail::dump(to_json(rows));
      } else {
        write_asymptotics_csv(os, rows);
      }
      detail::emit(cfg, out, os.str());
    } else if (bounds->parsed()) {
      const BetaExponent beta = detail::parse_critical_beta(beta_text);
      const KzBounds kz = bounds_kz(beta);
      const double improved = improved_bound_for(beta.is_infinite() ? 50.0 : beta.value())(beta);
      if (cfg.json) {
        detail::emit(cfg, out,
                     detail::dump({{"beta", beta_json(beta)},
                                   {"lower_kz", kz.lower},
                                   {"upper_kz", kz.upper},
                                   {"upper_improved", improved}}));
      } else {
        std::ostringstream os;
        detail::line(os, "beta", beta.to_string());
        detail::line(os, "lower_kz", detail::num(kz.lower));
        detail::line(os, "upper_kz", detail::num(kz.upper));
        detail::line(os, "upper_improved", detail::num(improved));
        detail::emit(cfg, out, os.str());
      }
    }
  } catch (const domain_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const resolution_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const io_error& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  }
  return kOk;
}

}  // namespace vpcrit::cli
