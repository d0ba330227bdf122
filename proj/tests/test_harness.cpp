#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nirb/harness.hpp"
#include "nirb/transfer.hpp"

using namespace nirb;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path temp_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("nirb_test_" + tag);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("coarse resolution coupling") {
  CHECK(coarse_resolution(16, true) == 4);
  CHECK(coarse_resolution(32, true) == 4);
  CHECK(coarse_resolution(64, true) == 8);
  CHECK(coarse_resolution(128, true) == 8);
  CHECK(coarse_resolution(2, true) == 1);
  CHECK(coarse_resolution(32, false) == 6);
  CHECK(coarse_resolution(64, false) == 8);
}

TEST_CASE("study config parsing") {
  const auto c = parse_study_config(R"({
    "mesh_kind": "uniform",
    "fine_resolutions": [16, 32],
    "snapshot_count": 3,
    "seed": 7,
    "problem": "paper",
    "target_mu": [0.99, 0.8, 0.2, 0.78],
    "solver_kind": "hmm",
    "reference_factor": 2,
    "nested": false
  })");
  CHECK(c.mesh_kind == "uniform");
  CHECK(c.fine_resolutions == std::vector<int>{16, 32});
  CHECK(c.snapshot_count == 3);
  CHECK(c.seed == 7);
  CHECK(c.solver_kind == SolverKind::hmm);
  CHECK(c.reference_factor == 2);
  CHECK_FALSE(c.nested);

  // defaults and the triangular mode default
  const auto t = parse_study_config(
      R"({"mesh_kind":"triangular","fine_resolutions":[4],"target_mu":[1,0,0,1]})");
  CHECK(t.cell_point_mode == CellPointMode::circumcenter);
  CHECK(t.snapshot_count == 5);
  CHECK(t.seed == 42);
  CHECK(t.reference_factor == 4);
  CHECK(t.nested);
  CHECK(t.solver_kind == SolverKind::tpfa);
}

TEST_CASE("study config validation") {
  const std::string base = R"({"fine_resolutions":%R%,"target_mu":[1,0,0,1]%X%})";
  auto with = [&](const std::string& res, const std::string& extra) {
    std::string s = base;
    s.replace(s.find("%R%"), 3, res);
    s.replace(s.find("%X%"), 3, extra);
    return s;
  };
  CHECK_THROWS_AS(parse_study_config(with("[8,8]", "")), std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config(with("[16,8]", "")), std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config(with("[]", "")), std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config(with("[8]", R"(,"snapshot_count":0)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_study_config(with("[8]", R"(,"reference_factor":1)")),
                  std::invalid_argument);
  CHECK_THROWS_AS(build_mesh("hex", 4, CellPointMode::centroid), std::invalid_argument);
  CHECK_THROWS_AS(load_study_config("/nonexistent/config.json"), std::invalid_argument);
}

TEST_CASE("restriction preserves means and inverts injection") {
  const auto refined = build_uniform_rect_mesh(8);
  const auto target = build_uniform_rect_mesh(4);
  const auto p = manufactured_sine_problem();
  const auto u = solve_tpfa(refined, p, {});
  const auto r = restrict_field(refined, target, u);

  double mean_fine = 0.0, mean_coarse = 0.0;
  for (std::size_t k = 0; k < refined.cells.size(); ++k)
    mean_fine += refined.cells[k].measure * u.cell_values[k];
  for (std::size_t k = 0; k < target.cells.size(); ++k)
    mean_coarse += target.cells[k].measure * r.cell_values[k];
  CHECK(mean_coarse == doctest::Approx(mean_fine).epsilon(1e-14));

  const auto map = build_transfer(refined, target);
  const auto cf = cell_field(target, std::vector<double>{1, 2, 3, 4, 5, 6, 7, 8,
                                                         9, 10, 11, 12, 13, 14, 15, 16});
  const auto back = restrict_field(refined, target, inject(map, refined, cf));
  for (std::size_t k = 0; k < 16; ++k)
    CHECK(back.cell_values[k] == doctest::Approx(cf.cell_values[k]).epsilon(1e-14));
}

TEST_CASE("basis files round-trip bit-exactly") {
  const auto mesh = build_uniform_rect_mesh(8);
  const auto basis =
      offline_build(mesh, paper_problem(), sample_parameters(3, 42), SolverKind::tpfa);
  const fs::path dir = temp_dir("basis");
  const std::string path = (dir / "basis.bin").string();
  save_basis(basis, path);
  const auto loaded = load_basis(path);

  CHECK(loaded.size == basis.size);
  CHECK(loaded.mesh_kind == basis.mesh_kind);
  CHECK(loaded.mesh_n == basis.mesh_n);
  CHECK(loaded.mesh_mode == basis.mesh_mode);
  CHECK(loaded.solver_kind == basis.solver_kind);
  CHECK(loaded.fine_fingerprint == basis.fine_fingerprint);
  REQUIRE(loaded.eigenvalues.size() == basis.eigenvalues.size());
  for (std::size_t i = 0; i < basis.eigenvalues.size(); ++i)
    CHECK(loaded.eigenvalues[i] == basis.eigenvalues[i]);
  REQUIRE(loaded.training_parameters.size() == basis.training_parameters.size());
  for (std::size_t i = 0; i < basis.training_parameters.size(); ++i)
    for (std::size_t c = 0; c < 4; ++c)
      CHECK(loaded.training_parameters[i][c] == basis.training_parameters[i][c]);
  for (int i = 0; i < basis.size; ++i)
    for (std::size_t k = 0; k < basis.fields[i].cell_values.size(); ++k)
      CHECK(loaded.fields[i].cell_values[k] == basis.fields[i].cell_values[k]);

  // a second save produces the identical byte stream
  const std::string path2 = (dir / "basis2.bin").string();
  save_basis(loaded, path2);
  CHECK(slurp(path) == slurp(path2));

  const std::string blob = slurp(path);
  CHECK(blob.compare(0, 8, "NIRBB001") == 0);
}

TEST_CASE("basis files reject corruption") {
  const auto mesh = build_uniform_rect_mesh(4);
  const auto basis = offline_build(mesh, paper_problem(), sample_parameters(2, 1),
                                   SolverKind::tpfa);
  const fs::path dir = temp_dir("corrupt");
  const std::string good = (dir / "good.bin").string();
  save_basis(basis, good);
  std::string blob = slurp(good);

  {
    std::string bad = blob;
    bad[0] = 'X';
    std::ofstream(dir / "magic.bin", std::ios::binary) << bad;
    CHECK_THROWS_AS(load_basis((dir / "magic.bin").string()), std::invalid_argument);
  }
  {
    std::ofstream(dir / "trunc.bin", std::ios::binary) << blob.substr(0, blob.size() - 9);
    CHECK_THROWS_AS(load_basis((dir / "trunc.bin").string()), std::invalid_argument);
  }
  {
    std::ofstream(dir / "short.bin", std::ios::binary) << blob.substr(0, 10);
    CHECK_THROWS_AS(load_basis((dir / "short.bin").string()), std::invalid_argument);
  }
  CHECK_THROWS_AS(load_basis((dir / "missing.bin").string()), std::invalid_argument);
}

TEST_CASE("study csv format") {
  StudyResult res;
  StudyRow r;
  r.kind = "uniform";
  r.n_fine = 16;
  r.n_coarse = 4;
  r.h = std::sqrt(2.0) / 16.0;
  r.H = std::sqrt(2.0) / 4.0;
  r.basis_size = 5;
  r.err_fv_fine = 1e-3;
  r.err_fv_coarse = 4e-2;
  r.err_nirb = 2e-3;
  r.eps_proxy = 1e-5;
  r.t_offline_s = 0.5;
  r.t_online_s = 0.001;
  r.t_fine_solve_s = 0.1;
  r.nested = true;
  res.rows.push_back(r);

  const std::string text = study_csv_text(res);
  CHECK(text.substr(0, text.find('\n')) ==
        "kind,n_fine,n_coarse,h,H,N,err_fv_fine,err_fv_coarse,err_nirb,eps_proxy,"
        "t_offline_s,t_online_s,t_fine_solve_s,nested");
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.back() == '\n');

  const auto parsed = parse_study_csv(text);
  REQUIRE(parsed.rows.size() == 1);
  const auto& q = parsed.rows[0];
  CHECK(q.kind == r.kind);
  CHECK(q.n_fine == r.n_fine);
  CHECK(q.n_coarse == r.n_coarse);
  CHECK(q.h == r.h);  // %.17g survives the round trip
  CHECK(q.H == r.H);
  CHECK(q.basis_size == r.basis_size);
  CHECK(q.err_fv_fine == r.err_fv_fine);
  CHECK(q.err_fv_coarse == r.err_fv_coarse);
  CHECK(q.err_nirb == r.err_nirb);
  CHECK(q.eps_proxy == r.eps_proxy);
  CHECK(q.nested == r.nested);

  CHECK_THROWS_AS(parse_study_csv(""), std::invalid_argument);
  CHECK_THROWS_AS(parse_study_csv("header\na,b,c\n"), std::invalid_argument);
}

TEST_CASE("emitted outputs") {
  StudyResult res;
  StudyRow r;
  r.kind = "uniform";
  r.n_fine = 8;
  r.n_coarse = 2;
  r.h = 0.17;
  r.H = 0.7;
  r.basis_size = 2;
  r.err_fv_fine = 0.01;
  r.err_fv_coarse = 0.1;
  r.err_nirb = 0.02;
  r.eps_proxy = 0.001;
  r.nested = true;
  res.rows.push_back(r);
  const fs::path dir = temp_dir("emit");
  emit_outputs(res, dir.string());
  CHECK(fs::exists(dir / "study.csv"));
  CHECK(fs::exists(dir / "plot.gp"));
  const std::string gp = slurp(dir / "plot.gp");
  for (const char* col : {"err_fv_fine", "err_fv_coarse", "err_nirb", "'h'"})
    CHECK(gp.find(col) != std::string::npos);
  CHECK(gp.find("study.csv") != std::string::npos);

  StudyResult empty;
  CHECK_THROWS_AS(emit_outputs(empty, dir.string()), std::invalid_argument);
}

TEST_CASE("log-log slope fitting") {
  // exact second-order data
  std::vector<double> x{0.5, 0.25, 0.125}, y;
  for (double v : x) y.push_back(3.0 * v * v);
  CHECK(fit_loglog_slope(x, y) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK_THROWS_AS(fit_loglog_slope({1.0}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {1.0}), std::invalid_argument);
}

TEST_CASE("run_study is deterministic apart from timings") {
  StudyConfig c;
  c.mesh_kind = "uniform";
  c.fine_resolutions = {4, 8};
  c.snapshot_count = 2;
  c.seed = 42;
  c.problem = "paper";
  c.target_mu = {0.99, 0.8, 0.2, 0.78};
  c.solver_kind = SolverKind::tpfa;
  c.reference_factor = 2;
  c.nested = true;

  const auto a = run_study(c);
  const auto b = run_study(c);
  REQUIRE(a.rows.size() == 2);
  REQUIRE(b.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.rows[i].n_fine == c.fine_resolutions[i]);
    CHECK(a.rows[i].n_coarse == coarse_resolution(c.fine_resolutions[i], true));
    CHECK(a.rows[i].h == doctest::Approx(std::sqrt(2.0) / c.fine_resolutions[i]));
    CHECK(a.rows[i].basis_size == 2);
    CHECK(a.rows[i].nested);
    for (double v : {a.rows[i].err_fv_fine, a.rows[i].err_fv_coarse, a.rows[i].err_nirb,
                     a.rows[i].eps_proxy})
      CHECK(std::isfinite(v));
    CHECK(a.rows[i].err_fv_fine > 0.0);
    CHECK(a.rows[i].err_fv_coarse > a.rows[i].err_fv_fine);

    CHECK(a.rows[i].err_fv_fine == b.rows[i].err_fv_fine);
    CHECK(a.rows[i].err_fv_coarse == b.rows[i].err_fv_coarse);
    CHECK(a.rows[i].err_nirb == b.rows[i].err_nirb);
    CHECK(a.rows[i].eps_proxy == b.rows[i].eps_proxy);
  }
}

TEST_CASE("scheme order fits on coarse sweeps stay sane") {
  const double s = superconvergence_order("uniform", CellPointMode::centroid,
                                          SolverKind::tpfa, {4, 8, 16});
  CHECK(s > 1.5);
  const double e = energy_convergence_order(SolverKind::tpfa, {4, 8, 16});
  CHECK(e > 0.7);
  CHECK(e < 1.5);
}
