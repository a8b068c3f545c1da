#include <cmath>
#include <numbers>

#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/geometry.hpp"
#include "confimm/mobius.hpp"
#include "doctest.h"

using namespace confimm;

namespace {
constexpr double kPi = std::numbers::pi;

SampledImmersion surface(const char* spec, int resolution = 64) {
  return instantiate(parse_surface_spec(spec), resolution);
}
}  // namespace

TEST_SUITE("mobius") {
  TEST_CASE("inverting the unit sphere from (3,0,0) gives a round sphere") {
    const SampledImmersion imm = surface("sphere");
    const SampledImmersion img = apply(MobiusMap::inversion(Eigen::Vector3d(3.0, 0.0, 0.0)), imm);
    // x = 1 and x = -1 on the axis map to 3 - 1/2 and 3 - 1/4, a diameter of the image.
    const double p = 3.0 - 1.0 / 2.0, q = 3.0 - 1.0 / 4.0;
    const Eigen::Vector3d c((p + q) / 2.0, 0.0, 0.0);
    const double radius = std::abs(q - p) / 2.0;
    double err = 0.0;
    for (Eigen::Index k = 0; k < img.f.cols(); ++k) err = std::max(err, std::abs((img.f.col(k) - c).norm() - radius));
    CHECK(err < 1e-12);
    CHECK(conformality_check(img) < 1e-8);
    const EnergyReport e = energy_report(img, build_geometry(img));
    CHECK(e.willmore == doctest::Approx(4.0 * kPi).epsilon(1e-8));
  }

  TEST_CASE("conformal factor update rule") {
    const SampledImmersion imm = surface("enneper");
    const MobiusMap map = MobiusMap::inversion(Eigen::Vector3d(0.0, 0.0, 2.0));
    const SampledImmersion img = apply(map, imm);
    const Eigen::VectorXd predicted = predicted_conformal_factor(map, imm);
    CHECK((build_geometry(img).u - predicted).cwiseAbs().maxCoeff() < 1e-10);
  }

  TEST_CASE("trace-free energy density is invariant") {
    for (const char* spec : {"enneper", "clifford-torus", "f_eps(eps=0.5)"}) {
      const SampledImmersion imm = surface(spec);
      Eigen::VectorXd x0 = Eigen::VectorXd::Zero(imm.n);
      x0[imm.n - 1] = 3.0;
      CHECK(tracefree_invariance_check(imm, MobiusMap::inversion(x0)) < 1e-8);
    }
  }

  TEST_CASE("similarities preserve W and compose") {
    const SampledImmersion imm = surface("clifford-torus");
    Eigen::Matrix4d rot = Eigen::Matrix4d::Identity();
    rot.topLeftCorner<2, 2>() << 0.0, -1.0, 1.0, 0.0;
    const MobiusMap a = MobiusMap::similarity(2.0, rot, Eigen::Vector4d(1.0, 0.0, 0.0, 0.0));
    const MobiusMap b = MobiusMap::similarity(0.5, Eigen::Matrix4d::Identity(), Eigen::Vector4d::Zero());
    const MobiusMap ab = compose(b, a);
    const Eigen::Vector4d x(0.3, -0.2, 0.7, 0.1);
    CHECK((ab(x) - b(a(x))).norm() < 1e-14);
    const SampledImmersion img = apply(a, imm);
    CHECK(energy_report(img, build_geometry(img)).willmore ==
          doctest::Approx(energy_report(imm, build_geometry(imm)).willmore).epsilon(1e-12));
  }

  TEST_CASE("invalid maps are rejected") {
    MobiusMap bad = MobiusMap::identity(3);
    bad.scale = -1.0;
    CHECK_THROWS_AS(validate(bad), InvalidInput);
    MobiusMap skew = MobiusMap::identity(3);
    skew.rotation(0, 1) = 0.5;
    CHECK_THROWS_AS(validate(skew), InvalidInput);
    CHECK_THROWS_AS(compose(MobiusMap::inversion(Eigen::Vector3d::Zero()), MobiusMap::identity(3)), InvalidInput);
  }

  TEST_CASE("inversion centre on a node") {
    const SampledImmersion imm = surface("sphere", 32);
    CHECK_THROWS_AS(apply(MobiusMap::inversion(imm.f.col(5)), imm), CenterOnSurface);
  }

  TEST_CASE("energy identity with an empty preimage sum") {
    const SampledImmersion imm = surface("sphere", 128);
    const InversionIdentity id = inversion_energy_identity(imm, Eigen::Vector3d(3.0, 0.0, 0.0), {});
    CHECK(id.rhs == doctest::Approx(4.0 * kPi));
    CHECK(id.gap < 1e-6);
  }

  TEST_CASE("energy identity at a surface point") {
    const SampledImmersion imm = surface("sphere", 128);
    const Eigen::Vector2d z(0.3, 0.2);
    const Eigen::VectorXd x0 = interpolate(*imm.grid, 0, imm.f, z);
    const InversionIdentity id = inversion_energy_identity(imm, x0, {{0, z, 0}});
    CHECK(id.rhs == doctest::Approx(0.0));
    CHECK(std::abs(id.lhs) < 0.05);
    CHECK(id.excision_radii == kExcisionRadii);
    CHECK_THROWS_AS(inversion_energy_identity(imm, x0, {{0, {0.1, 0.1}, 0}}), DomainError);
  }
}
