#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "confimm/cli.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace confimm;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream o, e;
  Run r;
  r.code = run_cli(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "confimm_cli_tests" / name;
  fs::remove_all(p);
  return p;
}

nlohmann::json load(const fs::path& p) {
  std::ifstream in(p);
  return nlohmann::json::parse(in);
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("energy run writes a complete report") {
    const fs::path dir = scratch("energy");
    const Run r = run({"energy", "--surface", "sphere", "--grid", "64", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS willmore") != std::string::npos);
    const nlohmann::json j = load(dir / "energy.json");
    for (const char* key : {"schema", "experiment", "inputs", "results", "checks", "all_pass", "provenance", "timestamp"})
      CHECK(j.contains(key));
    CHECK(j["experiment"] == "energy");
    CHECK(j["all_pass"] == true);
    CHECK(j["inputs"]["grid"] == 64);
    CHECK(j["timestamp"].contains("utc"));
    CHECK(j["timestamp"].contains("runtime_s"));
  }

  TEST_CASE("a failing check exits 1") {
    const fs::path dir = scratch("fail");
    const Run r = run({"energy", "--surface", "product-torus(b=2)", "--grid", "16", "--tol", "willmore=1e-300",
                       "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.out.find("FAIL willmore") != std::string::npos);
    CHECK(load(dir / "energy.json")["all_pass"] == false);
  }

  TEST_CASE("invalid input exits 2") {
    const fs::path dir = scratch("invalid");
    CHECK(run({}).code == 2);
    CHECK(run({"frobnicate"}).code == 2);
    CHECK(run({"energy", "--surface", "sphere(", "--out", dir.string()}).code == 2);
    CHECK(run({"energy", "--tol", "nonsense=1", "--out", dir.string()}).code == 2);
    CHECK(run({"energy", "--tol", "willmore=-1", "--out", dir.string()}).code == 2);
    CHECK(run({"energy", "--grid", "4", "--out", dir.string()}).code == 2);
    CHECK(run({"lattice", "--tau", "0.1,-1", "--out", dir.string()}).code == 2);
    CHECK(run({"ingest", "--file", (dir / "missing.txt").string(), "--out", dir.string()}).code == 2);
    const Run on = run({"invert", "--grid", "32", "--center", "0,0,1", "--out", dir.string()});
    CHECK(on.code == 2);
    CHECK(on.err.find("--on-surface") != std::string::npos);
  }

  TEST_CASE("output directory precedence") {
    const fs::path env_dir = scratch("env"), flag_dir = scratch("flag");
    ::setenv("CONFIMM_OUT", env_dir.c_str(), 1);
    CHECK(run({"collar", "--ell", "0.5"}).code == 0);
    CHECK(fs::exists(env_dir / "collar.json"));
    CHECK(run({"collar", "--ell", "0.5", "--out", flag_dir.string()}).code == 0);
    CHECK(fs::exists(flag_dir / "collar.json"));
    ::unsetenv("CONFIMM_OUT");
  }

  TEST_CASE("config file values yield to flags") {
    const fs::path dir = scratch("config");
    fs::create_directories(dir);
    const fs::path cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"surface": "clifford-torus", "grid": 32, "out": ")" << dir.string()
                       << R"(", "tol": {"willmore": 0.5}})";
    CHECK(run({"energy", "--config", cfg.string(), "--grid", "48"}).code == 0);
    const nlohmann::json j = load(dir / "energy.json");
    CHECK(j["inputs"]["surface"] == "clifford-torus");
    CHECK(j["inputs"]["grid"] == 48);
    std::ofstream(cfg) << R"({"colour": "red"})";
    CHECK(run({"energy", "--config", cfg.string()}).code == 2);
  }

  TEST_CASE("export and ingest round trip") {
    const fs::path dir = scratch("roundtrip");
    const std::string file = (dir / "torus.grid").string();
    CHECK(run({"export", "--surface", "clifford-torus", "--grid", "64", "--file", file, "--out", dir.string()}).code == 0);
    CHECK(run({"ingest", file, "--out", dir.string()}).code == 0);
  }
}
