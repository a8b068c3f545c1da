#include <cmath>

#include "confimm/branch.hpp"
#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/geometry.hpp"
#include "doctest.h"

using namespace confimm;

namespace {

SampledImmersion power_branch(int m, int resolution = 128) {
  return instantiate(parse_surface_spec("power-branch(m=" + std::to_string(m) + ")"), resolution);
}

}  // namespace

TEST_SUITE("branch") {
  TEST_CASE("branch order of power-branch(m)") {
    for (int m = 0; m <= 3; ++m) {
      const BranchEstimate est = estimate_branch_order(power_branch(m), std::ldexp(1.0, -8));
      CAPTURE(m);
      CHECK(est.m == m);
      CHECK(std::abs(est.alpha_raw - m) < 1e-3);
      CHECK(est.unbranched == (m == 0));
      // f = z^{m+1}/(m+1) has u = m log|z|, so omega(0) = 0.
      CHECK(std::abs(est.omega0) < 1e-2);
      CHECK(std::abs(est.density_limit - (m + 1.0)) < 0.02 * (m + 1.0));
    }
  }

  TEST_CASE("density ratios converge to m + 1") {
    // mu(D_rho) = pi rho^{2m+2}/(m+1), r(rho) = rho^{m+1}/(m+1): ratio m + 1.
    for (int m : {0, 1, 3}) {
      double prev = 1.0;
      for (int R : {128, 256}) {
        const SampledImmersion imm = power_branch(m, R);
        const BranchEstimate est = estimate_branch_order(imm, std::ldexp(1.0, -8));
        const DensityProfile p = density_ratio_profile(imm, est, {0.125, 0.25, 0.5});
        double err = 0.0;
        for (double r : p.ratio) err = std::max(err, std::abs(r / (m + 1.0) - 1.0));
        CAPTURE(m);
        CAPTURE(R);
        CHECK(err < 0.02);
        CHECK(err <= prev);
        prev = err;
      }
    }
  }

  TEST_CASE("disk area of the identity chart") {
    CHECK(disk_area(power_branch(0, 64), 0.5) == doctest::Approx(0.25 * 3.141592653589793).epsilon(1e-12));
  }

  TEST_CASE("circle means of u = m log r") {
    const SampledImmersion imm = power_branch(2, 64);
    const GeometryFields g = build_geometry(imm);
    CHECK(circle_mean(*imm.grid, g.u, 0.3) == doctest::Approx(2.0 * std::log(0.3)).epsilon(1e-10));
  }

  TEST_CASE("blow-up of a monomial is exact") {
    const SampledImmersion imm = power_branch(1);
    const BranchEstimate est = estimate_branch_order(imm, std::ldexp(1.0, -8));
    const BlowupTable t = blowup_check(imm, est, {0.05, 0.0}, {1.0, 2.0, 4.0});
    for (const auto& row : t.rows) CHECK(row.distance < 1e-4);
  }

  TEST_CASE("f_eps is unbranched and its blow-up converges") {
    const SampledImmersion imm = instantiate(parse_surface_spec("f_eps(eps=0.5)"), 128);
    const BranchEstimate est = estimate_branch_order(imm, std::ldexp(1.0, -8));
    CHECK(est.m == 0);
    CHECK(est.unbranched);
    const BlowupTable t = blowup_check(imm, est, {0.05, 0.0}, {1.0, 2.0, 4.0, 8.0});
    CHECK(t.decreasing);
  }

  TEST_CASE("non-integral log slopes are not classified") {
    const SampledImmersion imm = instantiate(parse_surface_spec("f_eps(eps=0.05)"), 128);
    CHECK_THROWS_AS(estimate_branch_order(imm, std::ldexp(1.0, -8)), ClassificationFailed);
  }

  TEST_CASE("input validation") {
    const SampledImmersion imm = power_branch(1, 64);
    CHECK_THROWS_AS(estimate_branch_order(imm, 0.0), InvalidInput);
    CHECK_THROWS_AS(estimate_branch_order(imm, 0.3), DomainError);
    const SampledImmersion torus = instantiate(parse_surface_spec("clifford-torus"), 32);
    CHECK_THROWS_AS(estimate_branch_order(torus, 0.01), DomainError);
  }
}
