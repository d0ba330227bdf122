#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "nirb/harness.hpp"
#include "nirb/mesh.hpp"

using namespace nirb;

namespace {

void check_invariants(const PolytopalMesh& m) {
  double total = 0.0;
  for (const auto& K : m.cells) total += K.measure;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  for (const auto& f : m.faces) {
    CHECK(f.cell[0] >= 0);
    for (int s = 0; s < 2; ++s) {
      if (f.cell[s] < 0) continue;
      CHECK(f.dist[s] > 0.0);
      CHECK(std::abs(norm(f.normal[s]) - 1.0) <= 1e-14);
    }
    if (!f.boundary()) {
      CHECK(norm(f.normal[0] + f.normal[1]) <= 1e-14);
      CHECK(f.interior_id >= 0);
    }
  }

  for (int k = 0; k < static_cast<int>(m.cells.size()); ++k) {
    const Cell& K = m.cells[k];
    Vec2 closed{0.0, 0.0};
    double cone_total = 0.0;
    for (int fid : K.faces) {
      const Face& f = m.faces[fid];
      const int s = f.side_of(k);
      closed += f.measure * f.normal[s];
      cone_total += f.measure * f.dist[s] / 2.0;
    }
    CHECK(norm(closed) <= 1e-12);
    CHECK(cone_total == doctest::Approx(K.measure).epsilon(1e-12));
  }
}

}  // namespace

TEST_CASE("uniform n=1") {
  const auto m = build_uniform_rect_mesh(1);
  CHECK(m.cells.size() == 1);
  CHECK(m.cells[0].measure == doctest::Approx(1.0));
  CHECK(m.faces.size() == 4);
  CHECK(m.interior_face_count == 0);
  check_invariants(m);
}

TEST_CASE("uniform n=2 geometry") {
  const auto m = build_uniform_rect_mesh(2);
  CHECK(m.cells.size() == 4);
  int interior = 0, boundary = 0;
  for (const auto& f : m.faces) (f.boundary() ? boundary : interior)++;
  CHECK(interior == 4);
  CHECK(boundary == 8);
  for (const auto& K : m.cells) CHECK(K.measure == doctest::Approx(0.25));
  for (const auto& f : m.faces)
    for (int s = 0; s < 2; ++s)
      if (f.cell[s] >= 0) CHECK(f.dist[s] == doctest::Approx(0.25));
  CHECK(m.mesh_size == doctest::Approx(std::sqrt(2.0) / 2.0));
  check_invariants(m);
}

TEST_CASE("uniform n=4 regularity") {
  const auto m = build_uniform_rect_mesh(4);
  double total = 0.0;
  for (const auto& K : m.cells) total += K.measure;
  CHECK(std::abs(total - 1.0) <= 1e-15);
  const auto d = compute_diagnostics(m);
  CHECK(d.theta == doctest::Approx(5.0 + 2.0 * std::sqrt(2.0)).epsilon(1e-13));
  CHECK(d.superadmissible);
  CHECK(d.e_max == 0.0);
  CHECK(d.theta >= 3.0);
}

TEST_CASE("uniform rejects n=0") {
  CHECK_THROWS_AS(build_uniform_rect_mesh(0), std::invalid_argument);
  CHECK_THROWS_AS(build_triangular_mesh(0, CellPointMode::centroid), std::invalid_argument);
}

TEST_CASE("uniform nesting is exact") {
  const auto coarse = build_uniform_rect_mesh(3);
  const auto fine = build_uniform_rect_mesh(6);
  for (const auto& K : fine.cells) {
    const int c = locate_cell(coarse, K.centroid);
    for (int v : K.vertices) {
      const Vec2 p = fine.vertices[v];
      const Cell& C = coarse.cells[c];
      CHECK(p.x >= coarse.vertices[C.vertices[0]].x - 1e-14);
      CHECK(p.x <= coarse.vertices[C.vertices[2]].x + 1e-14);
      CHECK(p.y >= coarse.vertices[C.vertices[0]].y - 1e-14);
      CHECK(p.y <= coarse.vertices[C.vertices[2]].y + 1e-14);
    }
  }
}

TEST_CASE("build determinism and fingerprints") {
  const auto a = build_triangular_mesh(3, CellPointMode::circumcenter);
  const auto b = build_triangular_mesh(3, CellPointMode::circumcenter);
  REQUIRE(a.vertices.size() == b.vertices.size());
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    CHECK(a.vertices[i].x == b.vertices[i].x);
    CHECK(a.vertices[i].y == b.vertices[i].y);
  }
  CHECK(a.fingerprint == b.fingerprint);
  CHECK(a.fingerprint != build_triangular_mesh(3, CellPointMode::centroid).fingerprint);
  CHECK(a.fingerprint != build_uniform_rect_mesh(3).fingerprint);
}

TEST_CASE("triangular mesh invariants") {
  for (const auto mode : {CellPointMode::centroid, CellPointMode::circumcenter})
    for (int n : {1, 2, 3, 4}) {
      CAPTURE(n);
      const auto m = build_triangular_mesh(n, mode);
      CHECK(m.cells.size() == static_cast<std::size_t>(14 * n * n));
      CHECK(m.groups.size() == static_cast<std::size_t>(n * n));
      check_invariants(m);
    }
}

TEST_CASE("triangular diagnostics") {
  const auto circ = build_triangular_mesh(2, CellPointMode::circumcenter);
  const auto dc = compute_diagnostics(circ);
  CHECK(dc.superadmissible);
  CHECK(dc.e_max > 0.0);

  const auto cen = build_triangular_mesh(2, CellPointMode::centroid);
  const auto dn = compute_diagnostics(cen);
  CHECK(dn.e_max == 0.0);
  CHECK_FALSE(dn.superadmissible);
}

TEST_CASE("group offsets shrink like H^2") {
  std::vector<double> hs, es;
  for (int n : {4, 8, 16, 32}) {
    const auto m = build_triangular_mesh(n, CellPointMode::circumcenter);
    hs.push_back(1.0 / n);
    es.push_back(compute_diagnostics(m).e_group_max);
  }
  CHECK(fit_loglog_slope(hs, es) >= 1.9);
  // constant in e_group_max <= C H^2 stays bounded across the sweep
  for (std::size_t i = 0; i < hs.size(); ++i) CHECK(es[i] <= 1.0 * hs[i] * hs[i]);
}

TEST_CASE("locate_cell on uniform grids") {
  const auto m = build_uniform_rect_mesh(2);
  CHECK(locate_cell(m, {0.1, 0.1}) == 0);
  CHECK(locate_cell(m, {0.6, 0.1}) == 1);
  CHECK(locate_cell(m, {0.5, 0.5}) == 0);  // tie resolves to the lowest id
  CHECK(locate_cell(m, {0.5, 0.1}) == 0);
  CHECK(locate_cell(m, {1.0, 1.0}) == 3);
  CHECK_THROWS_AS(locate_cell(m, {1.1, 0.0}), std::invalid_argument);
  CHECK_THROWS_AS(locate_cell(m, {0.5, -0.1}), std::invalid_argument);
}

TEST_CASE("locate_cell on triangulations") {
  for (int n : {1, 3}) {
    const auto m = build_triangular_mesh(n, CellPointMode::centroid);
    for (int k = 0; k < static_cast<int>(m.cells.size()); ++k)
      CHECK(locate_cell(m, m.cells[k].centroid) == k);
  }
}
