#pragma once

// JSON forms of the reports. Non-finite numbers become null.

#include <cmath>
#include <vector>

#include <nlohmann/json.hpp>

#include "vpcrit/critical.hpp"
#include "vpcrit/polytrope.hpp"
#include "vpcrit/tables.hpp"
#include "vpcrit/verify.hpp"

namespace vpcrit {

using json = nlohmann::json;

inline json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json beta_json(BetaExponent beta) {
  return beta.is_infinite() ? json("inf") : json(beta.value());
}

inline json to_json(const Polytrope& p) {
  return {{"n", p.n()},
          {"xi_n", p.first_zero()},
          {"slope", p.slope_at_zero()},
          {"slope_product", p.slope_product()}};
}

inline json to_json(const CriticalReport& r) {
  return {{"beta", beta_json(r.beta)},
          {"n", r.scaling.n},
          {"c_beta", r.scaling.c_beta},
          {"alpha_n", number_or_null(r.scaling.alpha_n)},
          {"A_n", number_or_null(r.scaling.A_n)},
          {"log_A_n", number_or_null(r.scaling.log_A_n)},
          {"R_beta", number_or_null(r.scaling.R_beta)},
          {"log_R_beta", number_or_null(r.scaling.log_R_beta)},
          {"xi_n", number_or_null(r.xi_n)},
          {"slope", r.slope},
          {"slope_product", r.slope_product},
          {"C_beta", r.C_beta},
          {"lower_kz", r.lower_kz},
          {"upper_kz", r.upper_kz},
          {"upper_improved", r.upper_improved},
          {"source", to_string(r.source)}};
}

inline json to_json(const VerificationReport& rep) {
  json residuals = json::object();
  json thresholds = json::object();
  json failed = json::array();
  for (const auto& c : rep.checks) {
    residuals[c.name] = number_or_null(c.residual);
    thresholds[c.name] = c.threshold;
    if (!c.pass) failed.push_back(c.name);
  }
  return {{"beta", rep.beta}, {"residuals", residuals}, {"thresholds", thresholds}, {"failed", failed}, {"pass", rep.pass}};
}

inline json to_json(const SweepRow& r) {
  return {{"beta", r.beta},
          {"n", r.n},
          {"xi_n", number_or_null(r.xi_n)},
          {"slope_product", r.slope_product},
          {"R_beta", number_or_null(r.R_beta)},
          {"C_beta", r.C_beta},
          {"lower_kz", r.lower_kz},
          {"upper_kz", r.upper_kz},
          {"upper_improved", r.upper_improved},
          {"source", to_string(r.source)}};
}

inline json to_json(const std::vector<SweepRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back(to_json(r));
  return {{"rows", arr}};
}

inline json to_json(const std::vector<AsymptoticsRow>& rows) {
  json arr = json::array();
  for (const auto& r : rows) {
    arr.push_back({{"beta", r.beta}, {"C_exact", r.C_exact}, {"C_asymptotic", r.C_asymptotic}, {"rel_gap", r.rel_gap}});
  }
  return {{"rows", arr}};
}

}  // namespace vpcrit
