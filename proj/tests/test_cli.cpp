#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nirb/cli.hpp"
#include "nirb/harness.hpp"

using namespace nirb;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  const fs::path dir = fs::temp_directory_path() / "nirb_test_cli";
  fs::create_directories(dir);
  return dir;
}

const char* kConfigJson = R"({
  "mesh_kind": "uniform",
  "fine_resolutions": [4, 8],
  "snapshot_count": 2,
  "seed": 42,
  "problem": "paper",
  "target_mu": [0.99, 0.8, 0.2, 0.78],
  "solver_kind": "tpfa",
  "reference_factor": 2,
  "nested": true
})";

}  // namespace

TEST_CASE("mesh-info succeeds") {
  CHECK(dispatch({"mesh-info", "--kind", "uniform", "--n", "4"}) == 0);
  CHECK(dispatch({"mesh-info", "--kind", "triangular", "--n", "2",
                  "--points", "circumcenter"}) == 0);
}

TEST_CASE("usage errors exit 1") {
  CHECK(dispatch({"mesh-info", "--n", "4", "--bogus"}) == 1);
  CHECK(dispatch({"mesh-info"}) == 1);               // missing --n
  CHECK(dispatch({}) == 1);                          // missing subcommand
  CHECK(dispatch({"mesh-info", "--n", "0"}) == 1);   // rejected by the validator
  CHECK(dispatch({"solve", "--n", "4", "--problem", "paper", "--mu", "abc"}) == 1);
  CHECK(dispatch({"solve", "--n", "4", "--kind", "hexagonal"}) == 1);
}

TEST_CASE("help exits 0") {
  CHECK(dispatch({"--help"}) == 0);
  CHECK(dispatch({"solve", "--help"}) == 0);
}

TEST_CASE("numerical failures exit 2") {
  // mu1 = -1 drives the diffusion coefficient negative
  CHECK(dispatch({"solve", "--n", "4", "--problem", "paper", "--mu", "-1,0,0,1"}) == 2);
}

TEST_CASE("solve writes a loadable field") {
  const fs::path out = work_dir() / "field.bin";
  CHECK(dispatch({"solve", "--n", "8", "--problem", "sine", "--scheme", "tpfa",
                  "--out", out.string()}) == 0);
  const auto wrapped = load_basis(out.string());
  CHECK(wrapped.size == 1);
  CHECK(wrapped.mesh_kind == "uniform");
  CHECK(wrapped.mesh_n == 8);
  REQUIRE(wrapped.fields[0].cell_values.size() == 64);

  const auto mesh = build_uniform_rect_mesh(8);
  const auto u = solve_tpfa(mesh, manufactured_sine_problem(), {});
  for (int k = 0; k < 64; ++k)
    CHECK(wrapped.fields[0].cell_values[k] == u.cell_values[k]);
}

TEST_CASE("offline, online, study flow") {
  const fs::path dir = work_dir();
  const fs::path cfg = dir / "config.json";
  std::ofstream(cfg) << kConfigJson;

  const fs::path basis = dir / "basis.bin";
  CHECK(dispatch({"offline", "--config", cfg.string(), "--out", basis.string()}) == 0);
  REQUIRE(fs::exists(basis));
  const auto loaded = load_basis(basis.string());
  CHECK(loaded.size == 2);
  CHECK(loaded.mesh_n == 8);  // built on the finest configured resolution

  const fs::path field = dir / "online.bin";
  const fs::path coeffs = dir / "coeffs.csv";
  CHECK(dispatch({"online", "--basis", basis.string(), "--n-coarse", "2", "--mu",
                  "0.99,0.8,0.2,0.78", "--out", field.string(), "--csv",
                  coeffs.string()}) == 0);
  CHECK(fs::exists(field));
  std::ifstream cf(coeffs);
  std::string header;
  std::getline(cf, header);
  CHECK(header == "i,eigenvalue,alpha");
  int lines = 0;
  for (std::string l; std::getline(cf, l);)
    if (!l.empty()) ++lines;
  CHECK(lines == 2);

  const fs::path out_dir = dir / "study";
  CHECK(dispatch({"study", "--config", cfg.string(), "--out-dir", out_dir.string()}) == 0);
  CHECK(fs::exists(out_dir / "study.csv"));
  CHECK(fs::exists(out_dir / "plot.gp"));
  std::ifstream csv(out_dir / "study.csv");
  std::string text((std::istreambuf_iterator<char>(csv)),
                   std::istreambuf_iterator<char>());
  const auto parsed = parse_study_csv(text);
  CHECK(parsed.rows.size() == 2);

  // missing inputs are usage errors
  CHECK(dispatch({"offline", "--config", (dir / "nope.json").string(), "--out",
                  (dir / "x.bin").string()}) == 1);
  CHECK(dispatch({"online", "--basis", (dir / "nope.bin").string(), "--n-coarse", "2",
                  "--mu", "1,0,0,1"}) == 1);
}

TEST_CASE("superconv runs") {
  CHECK(dispatch({"superconv", "--n-list", "4,8", "--scheme", "tpfa"}) == 0);
  CHECK(dispatch({"superconv", "--scheme", "tpfa"}) == 1);  // missing --n-list
}
