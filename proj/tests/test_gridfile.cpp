#include <cmath>
#include <numbers>
#include <sstream>

#include "confimm/catalog.hpp"
#include "confimm/error.hpp"
#include "confimm/geometry.hpp"
#include "confimm/gridfile.hpp"
#include "doctest.h"

using namespace confimm;

namespace {

SampledImmersion round_trip(const SampledImmersion& imm) {
  std::stringstream ss;
  write_grid(ss, imm);
  return read_grid(ss);
}

std::string error_of(const std::string& text) {
  std::istringstream in(text);
  try {
    read_grid(in);
  } catch (const InvalidInput& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("gridfile") {
  TEST_CASE("round trips keep positions and layout") {
    for (const char* spec : {"clifford-torus", "sphere", "enneper"}) {
      const SampledImmersion a = instantiate(parse_surface_spec(spec), 32);
      const SampledImmersion b = round_trip(a);
      CAPTURE(spec);
      CHECK(b.grid->kind == a.grid->kind);
      CHECK(b.grid->patches.size() == a.grid->patches.size());
      REQUIRE(b.f.cols() == a.f.cols());
      CHECK((a.f - b.f).cwiseAbs().maxCoeff() == 0.0);
      CHECK(b.source == DerivativeSource::finite_difference);
    }
  }

  TEST_CASE("energies survive a round trip") {
    const SampledImmersion a = instantiate(parse_surface_spec("product-torus(b=2)"), 128);
    const SampledImmersion b = round_trip(a);
    const EnergyReport ea = energy_report(a, build_geometry(a));
    const EnergyReport eb = energy_report(b, build_geometry(b));
    CHECK(eb.willmore == doctest::Approx(ea.willmore).epsilon(1e-4));
    CHECK(std::abs(eb.gauss_bonnet) < 1e-3);
  }

  TEST_CASE("errors name the offending line") {
    CHECK(error_of("") == "empty grid file");
    CHECK(error_of("domain=klein\n").rfind("line 1:", 0) == 0);
    CHECK(error_of("domain=flat-torus\nn=2\n").rfind("line 2:", 0) == 0);
    CHECK(error_of("domain=flat-torus\nn=3\nrows=2\ncols=2\nperiod=1 1\n0 0 1 x 3\n").rfind("line 6:", 0) == 0);
    CHECK(error_of("domain=flat-torus\nn=3\ncolour=red\n").rfind("line 3:", 0) == 0);
    CHECK(error_of("domain=disk\nrange=1 0\n").rfind("line 2:", 0) == 0);
  }

  TEST_CASE("non-uniform periodic spacing is rejected") {
    const std::string text =
        "domain=flat-torus\nn=3\nrows=3\ncols=3\nperiod=1 1\n"
        "0 0 0 0 0\n0 0.3333333333333333 0 1 0\n0 0.6666666666666666 0 2 0\n"
        "0.1 0 1 0 0\n0.1 0.3333333333333333 1 1 0\n0.1 0.6666666666666666 1 2 0\n"
        "0.6666666666666666 0 2 0 1\n0.6666666666666666 0.3333333333333333 2 1 1\n"
        "0.6666666666666666 0.6666666666666666 2 2 1\n";
    CHECK_FALSE(error_of(text).empty());
  }

  TEST_CASE("missing files") {
    CHECK_THROWS_AS(read_grid_file("/nonexistent/grid.txt"), InvalidInput);
  }
}
