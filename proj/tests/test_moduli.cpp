#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "confimm/error.hpp"
#include "confimm/moduli.hpp"
#include "doctest.h"
#include "lattice_oracle.hpp"

using namespace confimm;

TEST_SUITE("moduli") {
  TEST_CASE("lattice reduction matches the brute-force oracle") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> re(-4.0, 4.0), im(0.05, 6.0);
    for (int i = 0; i < 500; ++i) {
      const std::complex<double> tau(re(rng), im(rng));
      const LatticeReduction r = normalize_lattice(tau);
      const std::complex<double> ref = confimm::testing::reduce_by_search(tau);
      CAPTURE(tau);
      CHECK(std::abs(std::complex<double>(r.lattice.a, r.lattice.b) - ref) < 1e-12);
      CHECK(r.lattice.normalized(1e-12));
      const int det = r.basis.determinant();
      CHECK(std::abs(det) == 1);
      const std::complex<double> back = apply_basis(r.basis, tau);
      CHECK(std::abs(back - std::complex<double>(r.lattice.a, r.lattice.b)) < 1e-11);
      const LatticeReduction again = normalize_lattice({r.lattice.a, r.lattice.b});
      CHECK(again.lattice.a == r.lattice.a);
      CHECK(again.lattice.b == r.lattice.b);
    }
  }

  TEST_CASE("known reductions") {
    const LatticeReduction r = normalize_lattice({0.0, 0.5});
    CHECK(r.lattice.a == doctest::Approx(0.0));
    CHECK(r.lattice.b == doctest::Approx(2.0));
    REQUIRE(r.moves.size() == 1);
    CHECK(std::string(to_string(r.moves[0])) == "-1/tau");
    const LatticeReduction s = normalize_lattice({-2.3, 1.5});
    CHECK(s.lattice.a == doctest::Approx(0.3));
    CHECK(s.lattice.b == doctest::Approx(1.5));
  }

  TEST_CASE("invalid lattice parameters") {
    CHECK_THROWS_AS(normalize_lattice({0.3, 0.0}), InvalidInput);
    CHECK_THROWS_AS(normalize_lattice({0.3, -1.0}), InvalidInput);
    CHECK_THROWS_AS(normalize_lattice({std::nan(""), 1.0}), InvalidInput);
    Eigen::Matrix2i m;
    m << 2, 0, 0, 1;
    CHECK_THROWS_AS(apply_basis(m, {0.0, 1.0}), InvalidInput);
  }

  TEST_CASE("collar half-lengths") {
    CHECK(collar_half_length(1.0) == doctest::Approx(1.09041524766117).epsilon(1e-13));
    CHECK(collar_half_length(0.1) == doctest::Approx(15.2081714711684).epsilon(1e-13));
    CHECK(collar_half_length(2.0) == doctest::Approx(0.352513421777619).epsilon(1e-13));
    // T(l) ~ pi / (2 l) as l -> 0.
    CHECK(collar_half_length(1e-3) * 1e-3 == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-3));
    CHECK_THROWS_AS(collar_half_length(0.0), InvalidInput);
  }

  TEST_CASE("collar closed forms") {
    const double ell = 0.5;
    const CollarPoint c = collar_geometry(ell, 0.0);
    CHECK(c.metric_factor == doctest::Approx(ell * ell));
    CHECK(c.curvature == doctest::Approx(0.0));
    CHECK(c.length == doctest::Approx(ell));
    const double t = 1.2;
    const CollarPoint d = collar_geometry(ell, t);
    CHECK(d.metric_factor == doctest::Approx(ell * ell / std::pow(std::cos(ell * t), 2)));
    CHECK(d.curvature == doctest::Approx(std::sin(ell * t)));
    CHECK_THROWS_AS(collar_geometry(ell, collar_half_length(ell) + 0.1), DomainError);
  }

  TEST_CASE("collar metric is the hyperbolic pullback") {
    for (double ell : {1e-3, 0.1, 1.0}) {
      CHECK(collar_isometry_check(ell, collar_sample_points(ell, 200, 3)) < 1e-8);
    }
  }

  TEST_CASE("degeneration series") {
    const DegenerationSeries s = degeneration_series({1.0, 2.0, 4.0, 8.0}, 64);
    REQUIRE(s.rows.size() == 4);
    CHECK(s.label == "family evidence");
    for (const auto& row : s.rows) {
      CHECK(row.min_circle_diam == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(row.willmore == doctest::Approx(std::numbers::pi * std::numbers::pi * (row.b + 1.0 / row.b)).epsilon(1e-8));
    }
    CHECK(s.willmore_nondecreasing);
    CHECK(s.final_above_8pi);
    CHECK_THROWS_AS(degeneration_series({2.0, 1.0}, 32), InvalidInput);
  }
}
