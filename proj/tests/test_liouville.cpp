#include <cmath>
#include <numbers>

#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/liouville.hpp"
#include "doctest.h"
#include "kernels/kernels.hpp"

using namespace confimm;

namespace {

Eigen::VectorXd indicator(const ParamGrid& g, double radius) {
  Eigen::VectorXd s(static_cast<Eigen::Index>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) s[static_cast<Eigen::Index>(k)] = g.nodes[k].norm() < radius ? 1.0 : 0.0;
  return s;
}

}  // namespace

TEST_SUITE("liouville") {
  TEST_CASE("potential of the indicator of D_1/2") {
    const ParamGrid g = make_polar_grid(polar_options(64));
    const PotentialSolver solver(g, indicator(g, 0.5));
    // -(1/2pi) int_{|w|<1/2} log|w| dA = (1 - 2 log 1/2) / 16
    CHECK(solver.evaluate(Eigen::Vector2d(0.0, 0.0)) == doctest::Approx(0.149143397569993).epsilon(1e-10));
    // Outside the support v is -(area/2pi) log|z|.
    CHECK(solver.evaluate(Eigen::Vector2d(0.8, 0.1)) ==
          doctest::Approx(-(0.25 / 2.0) * std::log(std::hypot(0.8, 0.1))).epsilon(1e-10));
  }

  TEST_CASE("spectral and direct solvers agree") {
    const SampledImmersion imm = instantiate(parse_surface_spec("f_eps(eps=0.5)"), 32);
    const GeometryFields geo = build_geometry(imm);
    const Eigen::VectorXd src = (geo.K.array() * geo.area.array()).matrix();
    const Eigen::VectorXd a = solve_potential(*imm.grid, src).v;
    const Eigen::VectorXd b = solve_potential_direct(*imm.grid, src);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-3 * a.cwiseAbs().maxCoeff());
  }

  TEST_CASE("solver: serial and parallel paths agree") {
    const ParamGrid g = make_polar_grid(polar_options(64));
    const Eigen::VectorXd src = indicator(g, 0.5);
    const PotentialSolution s = solve_potential(g, src, Exec::serial);
    const PotentialSolution p = solve_potential(g, src, Exec::parallel);
    CHECK((s.v - p.v).cwiseAbs().maxCoeff() == 0.0);
    Eigen::VectorXd ds, dp;
    kernels::direct_log_sum(g, 1.0, src, ds, Exec::serial);
    kernels::direct_log_sum(g, 1.0, src, dp, Exec::parallel);
    CHECK((ds - dp).cwiseAbs().maxCoeff() < 1e-13);
  }

  TEST_CASE("interior residual is fourth order in the stencil step") {
    const SampledImmersion imm = instantiate(parse_surface_spec("f_eps(eps=0.5)"), 64);
    const GeometryFields geo = build_geometry(imm);
    const Eigen::VectorXd src = (geo.K.array() * geo.area.array()).matrix();
    const PotentialSolver solver(*imm.grid, src);
    const double r1 = interior_laplacian_residual(solver, *imm.grid, src, 0.02, 0.2, 0.7);
    const double r2 = interior_laplacian_residual(solver, *imm.grid, src, 0.01, 0.2, 0.7);
    CHECK(r1 / r2 == doctest::Approx(16.0).epsilon(0.1));
    // u - v is harmonic.
    CHECK(harmonic_defect(*imm.grid, geo.u, solver.values(), 0.1) < 1e-10);
  }

  TEST_CASE("logarithmic coefficient of a branched conformal factor") {
    const SampledImmersion imm = instantiate(parse_surface_spec("power-branch(m=2)"), 128);
    const GeometryFields geo = build_geometry(imm);
    const LogCoefficient c = log_coefficient(*imm.grid, geo.u, {0.1, 0.2, 0.4});
    CHECK(c.alpha == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(c.spread < 1e-8);
  }

  TEST_CASE("weak Liouville equation") {
    double prev = 1.0;
    for (int R : {128, 256}) {
      const SampledImmersion imm = instantiate(parse_surface_spec("sphere"), R);
      const GeometryFields geo = build_geometry(imm);
      const double res = std::abs(liouville_residual(imm, geo, bump_function(*imm.grid, 0, {0.5, 0.0}, 0.3)));
      CHECK(res < 1e-3);
      CHECK(res < prev);
      prev = res;
    }
  }

  TEST_CASE("test functions must vanish near the chart boundary") {
    const SampledImmersion imm = instantiate(parse_surface_spec("enneper"), 32);
    const GeometryFields geo = build_geometry(imm);
    CHECK_THROWS_AS(liouville_residual(imm, geo, bump_function(*imm.grid, 0, {0.8, 0.0}, 0.3)), DomainError);
    CHECK_THROWS_AS(bump_function(*imm.grid, 0, {0.0, 0.0}, -1.0), InvalidInput);
  }

  TEST_CASE("solver rejects non-finite sources") {
    const ParamGrid g = make_polar_grid(polar_options(32));
    Eigen::VectorXd s = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g.size()));
    s[3] = std::nan("");
    CHECK_THROWS_AS(PotentialSolver(g, s), InvalidInput);
  }
}
