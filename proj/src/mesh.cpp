#include "nirb/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <utility>

namespace nirb {

namespace {

constexpr double kGeomTol = 1e-12;

// Reference pattern splitting the unit parent square into 14 acute triangles.
// Vertices: 4 corners, 4 edge midpoints, and two centrally-symmetric pairs of
// interior points. All angles stay below 84 degrees for every perturbation
// used by the builder, so circumcenters are strictly interior.
constexpr double kP1x = 0.3312, kP1y = 0.3312;
constexpr double kP3x = 0.6226, kP3y = 0.3774;

constexpr double kPatternPoints[12][2] = {
    {0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0},
    {0.5, 0.0}, {0.5, 1.0}, {0.0, 0.5}, {1.0, 0.5},
    {kP1x, kP1y}, {1.0 - kP1x, 1.0 - kP1y},
    {kP3x, kP3y}, {1.0 - kP3x, 1.0 - kP3y}};

constexpr int kPatternTris[14][3] = {
    {11, 5, 3}, {6, 11, 3}, {7, 10, 1}, {10, 4, 1}, {9, 5, 11},
    {10, 9, 11}, {9, 10, 7}, {9, 7, 2},  {5, 9, 2},  {10, 8, 4},
    {4, 8, 0},  {8, 6, 0},  {6, 8, 11},  {8, 10, 11}};

constexpr bool kPatternCorner[12] = {true, true, true, true, false, false,
                                     false, false, false, false, false, false};

Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  const double d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
  const double a2 = dot(a, a), b2 = dot(b, b), c2 = dot(c, c);
  return {(a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
          (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d};
}

void finish_cell_geometry(PolytopalMesh& m) {
  for (auto& K : m.cells) {
    const int nv = static_cast<int>(K.vertices.size());
    double area = 0.0;
    Vec2 cen{0.0, 0.0};
    for (int i = 0; i < nv; ++i) {
      const Vec2 a = m.vertices[K.vertices[i]];
      const Vec2 b = m.vertices[K.vertices[(i + 1) % nv]];
      const double w = cross(a, b);
      area += w;
      cen += (a + b) * w;
    }
    area *= 0.5;
    K.measure = area;
    K.centroid = cen * (1.0 / (6.0 * area));
    K.diameter = 0.0;
    for (int i = 0; i < nv; ++i)
      for (int j = i + 1; j < nv; ++j)
        K.diameter = std::max(
            K.diameter, norm(m.vertices[K.vertices[i]] - m.vertices[K.vertices[j]]));
  }
  m.mesh_size = 0.0;
  for (const auto& K : m.cells) m.mesh_size = std::max(m.mesh_size, K.diameter);
}

// Builds the face table from the cells' CCW vertex loops. Faces are numbered
// in first-appearance order while sweeping cells by id and edges by loop
// order, which makes the numbering deterministic.
void build_faces(PolytopalMesh& m) {
  std::map<std::pair<int, int>, int> edge_to_face;
  for (int k = 0; k < static_cast<int>(m.cells.size()); ++k) {
    auto& K = m.cells[k];
    const int nv = static_cast<int>(K.vertices.size());
    for (int i = 0; i < nv; ++i) {
      const int a = K.vertices[i];
      const int b = K.vertices[(i + 1) % nv];
      const auto key = std::minmax(a, b);
      auto it = edge_to_face.find(key);
      int fid;
      if (it == edge_to_face.end()) {
        fid = static_cast<int>(m.faces.size());
        edge_to_face.emplace(key, fid);
        Face f;
        f.v0 = a;
        f.v1 = b;
        const Vec2 pa = m.vertices[a], pb = m.vertices[b];
        f.measure = norm(pb - pa);
        f.centroid = (pa + pb) * 0.5;
        m.faces.push_back(f);
      } else {
        fid = it->second;
      }
      Face& f = m.faces[fid];
      const int side = f.cell[0] < 0 ? 0 : 1;
      f.cell[side] = k;
      K.faces.push_back(fid);
    }
  }
  // Per-side normals and orthogonal distances, plus interior numbering.
  for (auto& f : m.faces) {
    const Vec2 t = m.vertices[f.v1] - m.vertices[f.v0];
    const Vec2 n0{t.y / f.measure, -t.x / f.measure};
    for (int s = 0; s < 2; ++s) {
      if (f.cell[s] < 0) continue;
      const Cell& K = m.cells[f.cell[s]];
      Vec2 nKs = n0;
      double d = dot(f.centroid - K.point, nKs);
      if (d < 0.0) {
        nKs = nKs * -1.0;
        d = -d;
      }
      f.normal[s] = nKs;
      f.dist[s] = d;
    }
    if (!f.boundary()) f.interior_id = m.interior_face_count++;
  }
}

void check_distances(const PolytopalMesh& m) {
  for (const auto& f : m.faces)
    for (int s = 0; s < 2; ++s)
      if (f.cell[s] >= 0 && f.dist[s] <= kGeomTol)
        throw std::runtime_error(
            "mesh build: degenerate cell-point placement (d_{K,sigma} <= 1e-12)");
}

}  // namespace

const char* to_string(CellPointMode m) {
  return m == CellPointMode::centroid ? "centroid" : "circumcenter";
}

CellPointMode cell_point_mode_from_string(const std::string& s) {
  if (s == "centroid") return CellPointMode::centroid;
  if (s == "circumcenter") return CellPointMode::circumcenter;
  throw std::invalid_argument("unknown cell point mode: " + s);
}

std::uint64_t mesh_fingerprint(const std::string& kind, int n, CellPointMode mode) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s:%d:%s", kind.c_str(), n, to_string(mode));
  std::uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (const char* p = buf; *p; ++p) {
    h ^= static_cast<unsigned char>(*p);
    h *= 1099511628211ULL;
  }
  return h;
}

PolytopalMesh build_uniform_rect_mesh(int n) {
  if (n < 1) throw std::invalid_argument("build_uniform_rect_mesh: n must be >= 1");
  PolytopalMesh m;
  m.kind = "uniform";
  m.resolution = n;
  m.mode = CellPointMode::centroid;
  m.fingerprint = mesh_fingerprint(m.kind, n, m.mode);

  const auto vid = [n](int i, int j) { return j * (n + 1) + i; };
  m.vertices.resize(static_cast<std::size_t>(n + 1) * (n + 1));
  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      m.vertices[vid(i, j)] = {static_cast<double>(i) / n, static_cast<double>(j) / n};

  m.cells.resize(static_cast<std::size_t>(n) * n);
  m.groups.reserve(m.cells.size());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      Cell& K = m.cells[j * n + i];
      K.vertices = {vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)};
      K.point = {(i + 0.5) / n, (j + 0.5) / n};
      m.groups.push_back({j * n + i});  // singleton groups on rectangles
    }
  finish_cell_geometry(m);
  for (auto& K : m.cells) K.point = K.centroid;
  build_faces(m);
  check_distances(m);
  return m;
}

PolytopalMesh build_triangular_mesh(int n, CellPointMode mode) {
  if (n < 1) throw std::invalid_argument("build_triangular_mesh: n must be >= 1");
  PolytopalMesh m;
  m.kind = "triangular";
  m.resolution = n;
  m.mode = mode;
  m.fingerprint = mesh_fingerprint(m.kind, n, mode);

  // Steiner points (everything except the parent-square corners) are shifted
  // by delta = 0.1/n in parent coordinates. This breaks the pattern's central
  // symmetry so the group offsets e_G are a genuine O(H^2) quantity instead of
  // exact zeros; components normal to the domain boundary are suppressed so
  // the mesh still tiles [0,1]^2 exactly.
  const double shift = 0.1 / n / n;  // parent-coordinate delta mapped to [0,1]^2

  std::map<std::pair<double, double>, int> vid;
  const auto getv = [&](double x, double y) {
    auto it = vid.find({x, y});
    if (it != vid.end()) return it->second;
    const int id = static_cast<int>(m.vertices.size());
    vid.emplace(std::make_pair(x, y), id);
    m.vertices.push_back({x, y});
    return id;
  };

  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int loc[12];
      for (int v = 0; v < 12; ++v) {
        double gx = (i + kPatternPoints[v][0]) / n;
        double gy = (j + kPatternPoints[v][1]) / n;
        if (!kPatternCorner[v]) {
          if (gx > kGeomTol && gx < 1.0 - kGeomTol) gx += shift;
          if (gy > kGeomTol && gy < 1.0 - kGeomTol) gy += shift;
        }
        loc[v] = getv(gx, gy);
      }
      std::vector<int> group;
      for (const auto& t : kPatternTris) {
        Cell K;
        K.vertices = {loc[t[0]], loc[t[1]], loc[t[2]]};
        const Vec2 a = m.vertices[K.vertices[0]];
        const Vec2 b = m.vertices[K.vertices[1]];
        const Vec2 c = m.vertices[K.vertices[2]];
        if (cross(b - a, c - a) < 0.0) std::swap(K.vertices[1], K.vertices[2]);
        group.push_back(static_cast<int>(m.cells.size()));
        m.cells.push_back(std::move(K));
      }
      m.groups.push_back(std::move(group));
    }

  finish_cell_geometry(m);
  for (auto& K : m.cells) {
    if (mode == CellPointMode::centroid) {
      K.point = K.centroid;
    } else {
      K.point = circumcenter(m.vertices[K.vertices[0]], m.vertices[K.vertices[1]],
                             m.vertices[K.vertices[2]]);
    }
  }
  build_faces(m);
  check_distances(m);
  return m;
}

MeshDiagnostics compute_diagnostics(const PolytopalMesh& m) {
  MeshDiagnostics d;
  double max_ratio = 1.0;
  double max_cell_term = 0.0;
  d.superadmissible = true;
  for (const auto& f : m.faces) {
    if (!f.boundary())
      max_ratio = std::max({max_ratio, f.dist[0] / f.dist[1], f.dist[1] / f.dist[0]});
    for (int s = 0; s < 2; ++s) {
      if (f.cell[s] < 0) continue;
      const Cell& K = m.cells[f.cell[s]];
      const Vec2 dir = (f.centroid - K.point) * (1.0 / f.dist[s]);
      if (norm(f.normal[s] - dir) > 1e-10) d.superadmissible = false;
    }
  }
  for (int k = 0; k < static_cast<int>(m.cells.size()); ++k) {
    const Cell& K = m.cells[k];
    double worst = 0.0;
    for (int fid : K.faces) {
      const Face& f = m.faces[fid];
      worst = std::max(worst, K.diameter / f.dist[f.side_of(k)]);
    }
    max_cell_term = std::max(max_cell_term, worst + static_cast<double>(K.faces.size()));
    d.e_max = std::max(d.e_max, norm(K.centroid - K.point));
  }
  d.theta = max_ratio + max_cell_term;
  for (const auto& g : m.groups) {
    Vec2 acc{0.0, 0.0};
    double vol = 0.0;
    for (int k : g) {
      acc += m.cells[k].measure * (m.cells[k].centroid - m.cells[k].point);
      vol += m.cells[k].measure;
    }
    d.e_group_max = std::max(d.e_group_max, norm(acc) / vol);
  }
  return d;
}

namespace {

bool cell_contains(const PolytopalMesh& m, int k, Vec2 p) {
  const Cell& K = m.cells[k];
  const int nv = static_cast<int>(K.vertices.size());
  for (int i = 0; i < nv; ++i) {
    const Vec2 a = m.vertices[K.vertices[i]];
    const Vec2 b = m.vertices[K.vertices[(i + 1) % nv]];
    // normalized signed offset: negative outside, tolerance 1e-12 on unit domain
    if (cross(b - a, p - a) / norm(b - a) < -kGeomTol) return false;
  }
  return true;
}

int uniform_index(double coord, int n) {
  const double s = coord * n;
  const double r = std::round(s);
  int i;
  if (std::abs(s - r) <= n * kGeomTol)
    i = static_cast<int>(r) - 1;  // on a grid line: take the lower cell
  else
    i = static_cast<int>(std::floor(s));
  return std::clamp(i, 0, n - 1);
}

}  // namespace

int locate_cell(const PolytopalMesh& m, Vec2 p) {
  if (p.x < -kGeomTol || p.x > 1.0 + kGeomTol || p.y < -kGeomTol || p.y > 1.0 + kGeomTol)
    throw std::invalid_argument("locate_cell: point outside [0,1]^2");
  const int n = m.resolution;
  const int pi = uniform_index(p.x, n);
  const int pj = uniform_index(p.y, n);
  if (m.kind == "uniform") return pj * n + pi;

  // Triangular: candidate parent squares are the arithmetic one and its
  // neighbours (Steiner perturbation lets triangles overhang square borders);
  // lowest containing cell id wins.
  int best = -1;
  for (int dj = -1; dj <= 1; ++dj)
    for (int di = -1; di <= 1; ++di) {
      const int i = pi + di, j = pj + dj;
      if (i < 0 || i >= n || j < 0 || j >= n) continue;
      for (int k : m.groups[j * n + i])
        if ((best < 0 || k < best) && cell_contains(m, k, p)) best = k;
    }
  if (best < 0)
    throw std::invalid_argument("locate_cell: point not contained in any cell");
  return best;
}

}  // namespace nirb
