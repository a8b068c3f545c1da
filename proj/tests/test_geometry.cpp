#include <cmath>
#include <numbers>

#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/geometry.hpp"
#include "doctest.h"

using namespace confimm;

namespace {
constexpr double kPi = std::numbers::pi;

SampledImmersion surface(const char* spec, int resolution = 64) {
  return instantiate(parse_surface_spec(spec), resolution);
}
}  // namespace

TEST_SUITE("geometry") {
  TEST_CASE("unit sphere: K = 1 and A0 = 0 at every node") {
    const SampledImmersion imm = surface("sphere");
    const GeometryFields g = build_geometry(imm);
    double err = 0.0;
    for (Eigen::Index k = 0; k < g.K.size(); ++k) {
      err = std::max({err, std::abs(g.K[k] - 1.0), std::abs(g.A0sq[k]) * std::exp(-2.0 * g.u[k])});
    }
    CHECK(err < 1e-10);
    const EnergyReport e = energy_report(imm, g);
    CHECK(e.willmore == doctest::Approx(4.0 * kPi).epsilon(1e-10));
    CHECK(e.area == doctest::Approx(4.0 * kPi).epsilon(1e-10));
    CHECK(e.total_A == doctest::Approx(8.0 * kPi).epsilon(1e-10));
    CHECK(e.tracefree_A == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(e.diam == doctest::Approx(2.0).epsilon(1e-3));
  }

  TEST_CASE("mean curvature of the unit sphere has length 2 in the induced metric") {
    const SampledImmersion imm = surface("sphere");
    const GeometryFields g = build_geometry(imm);
    const PointwiseChecks pw = pointwise_checks(imm, g);
    CHECK(pw.gauss_equation < 1e-10);
    CHECK(pw.decomposition < 1e-10);
    CHECK(pw.orthogonality < 1e-10);
    // 1/4 |H|^2 = 1 so W density equals the area density.
    const EnergyReport e = energy_report(imm, g);
    CHECK(e.willmore == doctest::Approx(e.area).epsilon(1e-12));
  }

  TEST_CASE("flat plane piece: everything vanishes") {
    const SampledImmersion imm = surface("plane");
    const GeometryFields g = build_geometry(imm);
    CHECK(g.u.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.Asq.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.K.cwiseAbs().maxCoeff() < 1e-14);
    CHECK(g.H.cwiseAbs().maxCoeff() < 1e-14);
  }

  TEST_CASE("Gauss-Bonnet on closed catalog surfaces") {
    for (const char* spec : {"sphere", "clifford-torus", "product-torus(b=3)"}) {
      const SampledImmersion imm = surface(spec, 128);
      const EnergyReport e = energy_report(imm, build_geometry(imm));
      const int chi = *imm.grid->euler_char;
      CHECK(std::abs(e.gauss_bonnet - 2.0 * kPi * chi) < 1e-6);
    }
  }

  TEST_CASE("product torus Willmore energy pi^2 (b + 1/b)") {
    for (double b : {1.0, 2.0, 5.0}) {
      const SampledImmersion imm =
          instantiate(parse_surface_spec("product-torus(b=" + std::to_string(b) + ")"), 64);
      const EnergyReport e = energy_report(imm, build_geometry(imm));
      CHECK(e.willmore == doctest::Approx(kPi * kPi * (b + 1.0 / b)).epsilon(1e-10));
      CHECK(e.total_A == doctest::Approx(4.0 * e.willmore).epsilon(1e-10));
    }
  }

  TEST_CASE("Gauss map identity and the gamma_n thresholds") {
    CHECK(gamma_n(3) == doctest::Approx(8.0 * kPi));
    CHECK(gamma_n(5) == doctest::Approx(4.0 * kPi));
    for (const char* spec : {"sphere", "f_eps(eps=0.5)", "enneper"}) {
      const SampledImmersion imm = surface(spec, 128);
      const GaussMapIdentity gm = gauss_map_identity_check(imm, build_geometry(imm));
      CHECK(gm.relative_gap < 1e-3);
    }
  }

  TEST_CASE("node geometry: serial and parallel paths agree") {
    const SampledImmersion imm = surface("clifford-torus");
    const GeometryFields s = build_geometry(imm, Exec::serial);
    const GeometryFields p = build_geometry(imm, Exec::parallel);
    CHECK((s.H - p.H).norm() == 0.0);
    CHECK((s.K - p.K).norm() == 0.0);
    const EnergyReport es = energy_report(imm, s, Exec::serial);
    const EnergyReport ep = energy_report(imm, p, Exec::parallel);
    CHECK(es.willmore == ep.willmore);
  }

  TEST_CASE("degenerate frames are reported with the node") {
    SampledImmersion imm = surface("plane", 32);
    imm.f2 = imm.f1;
    CHECK_THROWS_AS(build_geometry(imm), DegenerateImmersion);
  }

  TEST_CASE("finite-difference derivatives converge to the analytic ones") {
    const SampledImmersion a = surface("sphere", 64);
    const SampledImmersion fd = with_grid_derivatives(a);
    CHECK(fd.source == DerivativeSource::finite_difference);
    const EnergyReport e = energy_report(fd, build_geometry(fd));
    CHECK(e.willmore == doctest::Approx(4.0 * kPi).epsilon(1e-3));
  }

  TEST_CASE("scaling leaves W invariant and multiplies area by c^2") {
    const SampledImmersion a = surface("clifford-torus");
    const SampledImmersion b = scaled(a, 3.0);
    const EnergyReport ea = energy_report(a, build_geometry(a));
    const EnergyReport eb = energy_report(b, build_geometry(b));
    CHECK(eb.willmore == doctest::Approx(ea.willmore).epsilon(1e-12));
    CHECK(eb.area == doctest::Approx(9.0 * ea.area).epsilon(1e-12));
  }
}
