#include <cmath>
#include <numbers>

#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/geometry.hpp"
#include "doctest.h"

using namespace confimm;

namespace {
constexpr double kPi = std::numbers::pi;

EnergyReport energies(const std::string& spec, int resolution = 128) {
  const SampledImmersion imm = instantiate(parse_surface_spec(spec), resolution);
  return energy_report(imm, build_geometry(imm));
}
}  // namespace

TEST_SUITE("catalog") {
  TEST_CASE("spec grammar") {
    const SurfaceSpec s = parse_surface_spec(" f_eps( eps = 0.5 ) ");
    CHECK(s.name == "f_eps");
    CHECK(s.param("eps", 0.0) == 0.5);
    CHECK(s.n == 4);
    CHECK(parse_surface_spec("power-branch(m=2, n=5)").n == 5);
    CHECK(parse_surface_spec(to_string(s)).param("eps", 0.0) == 0.5);
    CHECK(catalog_names().size() == 8);
  }

  TEST_CASE("malformed specs are rejected") {
    for (const char* bad : {"", "nope", "f_eps(eps=0.5", "f_eps(eps)", "f_eps(eps=x)", "f_eps(foo=1)",
                            "f_eps(eps=1,eps=2)", "sphere(n=4)", "power-branch(m=1.5)", "f_eps(eps=-1)",
                            "enneper-blowdown(lambda=0.5)", "product-torus(b=0)"}) {
      CAPTURE(bad);
      CHECK_THROWS_AS(validate(parse_surface_spec(bad)), InvalidInput);
    }
  }

  TEST_CASE("f_eps conformal factor") {
    const auto model = make_model(parse_surface_spec("f_eps(eps=0.1)"));
    CHECK(model_u(*model, 0, {0.0, 0.0}) == doctest::Approx(std::log(0.1)));
    CHECK(model_u(*model, 0, {1.0, 0.0}) == doctest::Approx(0.5 * std::log(1.01)));
  }

  TEST_CASE("f_eps total curvature 4pi/(1+eps^2)") {
    for (double eps : {0.25, 0.5, 1.0, 2.0}) {
      const EnergyReport e = energies("f_eps(eps=" + std::to_string(eps) + ")");
      CHECK(std::abs(e.total_A - 4.0 * kPi / (1.0 + eps * eps)) < 1e-6);
    }
  }

  TEST_CASE("minimal catalog members have H = 0") {
    for (const char* spec : {"f_eps(eps=0.5)", "enneper", "enneper-blowdown(lambda=3)", "power-branch(m=2)"}) {
      const SampledImmersion imm = instantiate(parse_surface_spec(spec), 64);
      const GeometryFields g = build_geometry(imm);
      CHECK(pointwise_checks(imm, g).mean_curvature < 1e-8);
      CHECK(energy_report(imm, g).willmore < 1e-12);
    }
  }

  TEST_CASE("enneper blow-down stays below 8pi") {
    double prev = 0.0;
    for (double lambda : {1.0, 2.0, 4.0, 8.0}) {
      const EnergyReport e = energies("enneper-blowdown(lambda=" + std::to_string(lambda) + ")", 256);
      CHECK(e.total_A < 8.0 * kPi);
      CHECK(e.total_A > prev);
      // Gauss image of D_lambda is a spherical cap.
      CHECK(e.total_A == doctest::Approx(8.0 * kPi * lambda * lambda / (1.0 + lambda * lambda)).epsilon(1e-6));
      prev = e.total_A;
    }
  }

  TEST_CASE("power-branch(m=0) is the identity chart") {
    const SampledImmersion imm = instantiate(parse_surface_spec("power-branch(m=0)"), 32);
    for (Eigen::Index k = 0; k < imm.f.cols(); k += 37) {
      const Eigen::Vector2d z = imm.grid->nodes[static_cast<std::size_t>(k)];
      CHECK(imm.f(0, k) == doctest::Approx(z.x()));
      CHECK(imm.f(1, k) == doctest::Approx(z.y()));
      CHECK(imm.f.col(k).tail(imm.n - 2).norm() == 0.0);
    }
  }

  TEST_CASE("catalog immersions are conformal") {
    for (const auto& name : catalog_names()) {
      const SampledImmersion imm = instantiate(parse_surface_spec(name), 32);
      CAPTURE(name);
      CHECK(conformality_check(imm) < 1e-10);
    }
  }

  TEST_CASE("traits") {
    const SurfaceTraits s = traits(parse_surface_spec("sphere"));
    CHECK(s.closed);
    CHECK(*s.exact_willmore == doctest::Approx(4.0 * kPi));
    CHECK(*traits(parse_surface_spec("power-branch(m=3)")).origin_order == 3);
    CHECK_FALSE(traits(parse_surface_spec("power-branch(m=3)")).embedded);
  }

  TEST_CASE("helein probe: neither alternative below the threshold") {
    const HeleinProbe p = helein_dichotomy_probe({1.0, 0.5, 0.25, 0.125}, 64);
    REQUIRE(p.rows.size() == 4);
    CHECK(p.u0_diverging);
    CHECK(p.u_half_bounded);
    CHECK(p.total_A_increasing);
    CHECK(p.total_A_below_4pi);
    CHECK(p.neither_alternative);
    CHECK(p.rows.back().u0 == doctest::Approx(std::log(0.125)));
  }

  TEST_CASE("serial and parallel sampling agree") {
    const SurfaceSpec spec = parse_surface_spec("enneper");
    const SampledImmersion a = instantiate(spec, 64, Exec::serial);
    const SampledImmersion b = instantiate(spec, 64, Exec::parallel);
    CHECK((a.f22 - b.f22).norm() == 0.0);
  }
}
