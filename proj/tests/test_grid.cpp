#include <cmath>
#include <numbers>

#include "confimm/error.hpp"
#include "confimm/grid.hpp"
#include "confimm/quadrature.hpp"
#include "doctest.h"

using namespace confimm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_SUITE("grid") {
  TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
    const Rule1d r = gauss_legendre(8, 0.0, 2.0);
    for (int d = 0; d <= 15; ++d) {
      double s = 0.0;
      for (std::size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], d);
      CHECK(s == doctest::Approx(std::pow(2.0, d + 1) / (d + 1)).epsilon(1e-13));
    }
  }

  TEST_CASE("periodic axis: trapezoid weights and 4th-order derivatives") {
    const Axis a = Axis::periodic(64, 2.0 * kPi);
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += a.weight(i);
    CHECK(sum == doctest::Approx(2.0 * kPi));
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double d = 0.0;
      for (const auto& e : a.d1(i)) d += e.weight * std::sin(a.node(e.index));
      err = std::max(err, std::abs(d - std::cos(a.node(i))));
    }
    CHECK(err < 1e-5);
  }

  TEST_CASE("panel axis differentiates polynomials exactly") {
    const Axis a = Axis::panels({0.0, 0.25, 0.5, 1.0}, 8);
    CHECK(a.size() == 24);
    double err = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      double d = 0.0;
      for (const auto& e : a.d1(i)) d += e.weight * std::pow(a.node(e.index), 5);
      err = std::max(err, std::abs(d - 5.0 * std::pow(a.node(i), 4)));
    }
    CHECK(err < 1e-10);
  }

  TEST_CASE("partial integral on a panel axis") {
    const Axis a = Axis::panels({0.0, 0.5, 1.0}, 10);
    std::vector<StencilEntry> st;
    a.partial_integral(0.7, st);
    double s = 0.0;
    for (const auto& e : st) s += e.weight * std::exp(a.node(e.index));
    CHECK(s == doctest::Approx(std::exp(0.7) - 1.0).epsilon(1e-12));
  }

  TEST_CASE("polar grid: area of the unit disk and layout") {
    const ParamGrid g = make_polar_grid(polar_options(64));
    CHECK(g.size() == 64 * 64);
    CHECK(parameter_area(g) == doctest::Approx(kPi).epsilon(1e-13));
    CHECK_NOTHROW(validate(g));
    const PolarGridOptions o = polar_options(256);
    CHECK(o.points_per_panel * o.radial_panels == 256);
  }

  TEST_CASE("torus grid area and cells") {
    const ParamGrid g = make_torus_grid(32, 48, 1.0, 2.5);
    CHECK(parameter_area(g) == doctest::Approx(2.5));
    CHECK(g.closed());
    CHECK(g.euler_char == 0);
  }

  TEST_CASE("resolution below 16 is rejected") { CHECK_THROWS_AS(polar_options(8), InvalidInput); }

  TEST_CASE("cartesian derivatives on the disk converge") {
    // Away from the origin: the polar chain rule divides theta-derivative
    // errors by r and r^2.
    double prev = 1.0;
    for (int R : {64, 128}) {
      const ParamGrid g = make_polar_grid(polar_options(R));
      Eigen::MatrixXd f(1, static_cast<Eigen::Index>(g.size()));
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Eigen::Vector2d z = g.nodes[k];
        f(0, static_cast<Eigen::Index>(k)) = z.x() * z.x() * z.y() + std::sin(z.y());
      }
      const CartesianDerivatives d = cartesian_derivatives(g, f, true);
      double err = 0.0;
      for (std::size_t k = 0; k < g.size(); ++k) {
        const Eigen::Vector2d z = g.nodes[k];
        const auto kk = static_cast<Eigen::Index>(k);
        if (z.norm() < 0.05) continue;
        err = std::max({err, std::abs(d.dx(0, kk) - 2.0 * z.x() * z.y()),
                        std::abs(d.dy(0, kk) - z.x() * z.x() - std::cos(z.y())),
                        std::abs(d.dxy(0, kk) - 2.0 * z.x())});
      }
      CHECK(err < 1e-3);
      CHECK(err < prev);
      prev = err;
    }
  }

  TEST_CASE("grid derivatives: serial and parallel paths agree") {
    const ParamGrid g = make_polar_grid(polar_options(64));
    const Eigen::MatrixXd f = Eigen::MatrixXd::Random(3, static_cast<Eigen::Index>(g.size()));
    const GridDerivatives s = grid_derivatives(g, f, true, Exec::serial);
    const GridDerivatives p = grid_derivatives(g, f, true, Exec::parallel);
    CHECK((s.d1 - p.d1).norm() == 0.0);
    CHECK((s.d22 - p.d22).norm() == 0.0);
  }

  TEST_CASE("interpolation reproduces smooth fields") {
    const ParamGrid g = make_polar_grid(polar_options(64));
    Eigen::MatrixXd f(1, static_cast<Eigen::Index>(g.size()));
    for (std::size_t k = 0; k < g.size(); ++k) f(0, static_cast<Eigen::Index>(k)) = std::exp(g.nodes[k].x());
    const Eigen::Vector2d z(0.31, -0.42);
    CHECK(interpolate(g, 0, f, z)[0] == doctest::Approx(std::exp(0.31)).epsilon(1e-8));
  }
}
