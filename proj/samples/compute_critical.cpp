// Minimal library use: solve the polytrope for one beta, rescale, and check.
//
//   compute_critical [beta]      (default 2)

#include <cstdio>
#include <cstdlib>

#include "vpcrit/critical.hpp"
#include "vpcrit/polytrope.hpp"
#include "vpcrit/verify.hpp"

int main(int argc, char** argv) {
  using namespace vpcrit;
  try {
    const BetaExponent beta = BetaExponent::parse(argc > 1 ? argv[1] : "2");
    const double b = beta.value();

    Polytrope p = solve_polytrope(PolytropeIndex(n_of_beta(beta)));
    const ScalingConstants s = scaling_constants(beta, p);
    const double c = critical_constant(beta, p);
    const KzBounds kz = bounds_kz(beta);

    std::printf("beta = %g  n = %.6f\n", b, s.n);
    std::printf("xi_n = %.10f  -xi_n^2 theta'(xi_n) = %.10f\n", p.first_zero(), p.slope_product());
    std::printf("R_beta = %.10g\n", s.R_beta);
    std::printf("C_beta = %.12f   (%.6f <= C_beta <= %.6f)\n", c, kz.lower, kz.upper);

    const MinimizerProfile m = build_minimizer_profile(beta, std::move(p), s);
    const VerificationReport rep = verify_profile(m);
    for (const auto& chk : rep.checks) std::printf("  %-10s %.2e\n", chk.name.c_str(), chk.residual);
    return rep.pass ? EXIT_SUCCESS : EXIT_FAILURE;
  } catch (const vpcrit::error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
}
