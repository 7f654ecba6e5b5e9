#pragma once

// Beta grids, the sweep table and the asymptotics table, with CSV I/O.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "vpcrit/critical.hpp"
#include "vpcrit/errors.hpp"
#include "vpcrit/numerics.hpp"

namespace vpcrit {

enum class GridSpacing { linear, log_offset };

struct GridSpec {
  double beta_min = 1.51;
  double beta_max = 10.0;
  std::size_t points = 100;
  GridSpacing spacing = GridSpacing::log_offset;

  void validate() const {
    if (!(beta_min >= 1.5)) throw domain_error("grid: beta_min must be at least 3/2");
    if (!(beta_max > beta_min) || !std::isfinite(beta_max)) throw domain_error("grid: beta_max must exceed beta_min");
    if (points < 2) throw domain_error("grid: need at least 2 points");
    if (spacing == GridSpacing::log_offset && beta_min == 1.5) {
      throw domain_error("grid: log-offset spacing needs beta_min > 3/2");
    }
  }
};

/// Linear, or uniform in log(beta - 3/2). Both ends are hit exactly.
inline std::vector<double> make_grid(const GridSpec& g) {
  g.validate();
  std::vector<double> out(g.points);
  const double last = static_cast<double>(g.points - 1);
  for (std::size_t i = 0; i < g.points; ++i) {
    const double w = static_cast<double>(i) / last;
    if (g.spacing == GridSpacing::linear) {
      out[i] = g.beta_min + w * (g.beta_max - g.beta_min);
    } else {
      const double lo = std::log(g.beta_min - 1.5), hi = std::log(g.beta_max - 1.5);
      out[i] = 1.5 + std::exp(lo + w * (hi - lo));
    }
  }
  out.front() = g.beta_min;
  out.back() = g.beta_max;
  return out;
}

/// 12 significant digits; "inf", "-inf", "nan" for non-finite values.
inline std::string format_csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

inline double parse_csv_number(const std::string& field) {
  char* end = nullptr;
  const double x = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size()) {
    throw domain_error("CSV: not a number: '" + field + "'");
  }
  return x;
}

struct SweepRow {
  double beta;
  double n;
  double xi_n;
  double slope_product;
  double R_beta;
  double C_beta;
  double lower_kz;
  double upper_kz;
  double upper_improved;
  Source source;
};

inline constexpr const char* kSweepHeader =
    "beta,n,xi_n,slope_product,R_beta,C_beta,lower_kz,upper_kz,upper_improved,source";

inline SweepRow sweep_row(const CriticalReport& r) {
  return {r.beta.value(), r.scaling.n,  r.xi_n,     r.slope_product,  r.scaling.R_beta,
          r.C_beta,       r.lower_kz,   r.upper_kz, r.upper_improved, r.source};
}

/// Improved bound sized for a sweep reaching beta_max.
inline ImprovedUpperBound improved_bound_for(double beta_max) {
  return ImprovedUpperBound(default_bound_grid(std::max(50.0, beta_max)));
}

/// One row per grid point, in grid order.
inline std::vector<SweepRow> run_sweep(const GridSpec& spec, const Tolerances& tol = {}) {
  const auto grid = make_grid(spec);
  const ImprovedUpperBound improved = improved_bound_for(spec.beta_max);
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (double b : grid) rows.push_back(sweep_row(critical_report(BetaExponent::finite(b), improved, tol)));
  return rows;
}

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << kSweepHeader << '\n';
  for (const auto& r : rows) {
    for (double x : {r.beta, r.n, r.xi_n, r.slope_product, r.R_beta, r.C_beta, r.lower_kz, r.upper_kz,
                     r.upper_improved}) {
      os << format_csv_number(x) << ',';
    }
    os << to_string(r.source) << '\n';
  }
}

struct AsymptoticsRow {
  double beta;
  double C_exact;
  double C_asymptotic;
  double rel_gap;

  bool operator==(const AsymptoticsRow&) const = default;
};

inline constexpr const char* kAsymptoticsHeader = "beta,C_exact,C_asymptotic,rel_gap";

/// Endpoint row at 3/2, then `points` log-offset betas from 1.505 to beta_max.
inline std::vector<AsymptoticsRow> run_asymptotics(double beta_max, std::size_t points = 50,
                                                   const Tolerances& tol = {}) {
  if (!(beta_max > 1.5)) throw domain_error("asymptotics: beta_max must exceed 3/2");
  if (!(beta_max > kAsymptoticThreshold)) {
    throw domain_error("asymptotics: beta_max must exceed 1.505, below which no exact value is computed");
  }
  std::vector<AsymptoticsRow> rows;
  const double c32 = critical_at_three_halves();
  rows.push_back({1.5, c32, asymptotic_critical(BetaExponent::finite(1.5)), 0.0});
  rows.back().rel_gap = std::abs(rows.back().C_asymptotic - c32) / c32;
  for (double b : make_grid({kAsymptoticThreshold, beta_max, points, GridSpacing::log_offset})) {
    const auto beta = BetaExponent::finite(b);
    const Polytrope p = solve_polytrope(PolytropeIndex(n_of_beta(beta)), tol);
    const double exact = critical_constant(beta, p);
    const double approx = asymptotic_critical(beta);
    rows.push_back({b, exact, approx, std::abs(approx - exact) / exact});
  }
  return rows;
}

inline void write_asymptotics_csv(std::ostream& os, const std::vector<AsymptoticsRow>& rows) {
  os << kAsymptoticsHeader << '\n';
  for (const auto& r : rows) {
    os << format_csv_number(r.beta) << ',' << format_csv_number(r.C_exact) << ','
       << format_csv_number(r.C_asymptotic) << ',' << format_csv_number(r.rel_gap) << '\n';
  }
}

inline std::vector<AsymptoticsRow> parse_asymptotics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kAsymptoticsHeader) {
    throw domain_error("asymptotics CSV: missing or unexpected header");
  }
  std::vector<AsymptoticsRow> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(parse_csv_number(cell));
    if (f.size() != 4) throw domain_error("asymptotics CSV: expected 4 fields in '" + line + "'");
    rows.push_back({f[0], f[1], f[2], f[3]});
  }
  return rows;
}

}  // namespace vpcrit
