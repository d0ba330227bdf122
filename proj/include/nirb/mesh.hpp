#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nirb/geometry.hpp"

namespace nirb {

enum class CellPointMode { centroid, circumcenter };

const char* to_string(CellPointMode m);
CellPointMode cell_point_mode_from_string(const std::string& s);

struct Cell {
  std::vector<int> vertices;  // CCW
  std::vector<int> faces;
  double measure = 0.0;       // |K|
  Vec2 point;                 // x_K (scheme point)
  Vec2 centroid;              // x̄_K
  double diameter = 0.0;      // h_K
};

// A face stores per-side geometry: side 0 is always present, side 1 only for
// interior faces. n[i] is the outward unit normal of cell[i], dist[i] the
// orthogonal distance from that cell's point to the face line.
struct Face {
  int v0 = -1, v1 = -1;
  double measure = 0.0;  // |σ|
  Vec2 centroid;         // x̄_σ
  int cell[2] = {-1, -1};
  Vec2 normal[2];
  double dist[2] = {0.0, 0.0};
  int interior_id = -1;  // dense numbering of interior faces, -1 on boundary

  bool boundary() const { return cell[1] < 0; }
  int side_of(int k) const { return cell[0] == k ? 0 : 1; }
  int other(int k) const { return cell[0] == k ? cell[1] : cell[0]; }
};

struct PolytopalMesh {
  std::string kind;  // "uniform" | "triangular"
  int resolution = 0;
  CellPointMode mode = CellPointMode::centroid;

  std::vector<Vec2> vertices;
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<std::vector<int>> groups;  // cell groups for the e_G diagnostic

  double mesh_size = 0.0;  // h = max h_K
  int interior_face_count = 0;
  std::uint64_t fingerprint = 0;
};

struct MeshDiagnostics {
  double theta = 0.0;
  bool superadmissible = false;
  double e_max = 0.0;
  double e_group_max = 0.0;
};

PolytopalMesh build_uniform_rect_mesh(int n);
PolytopalMesh build_triangular_mesh(int n, CellPointMode mode);

MeshDiagnostics compute_diagnostics(const PolytopalMesh& mesh);

// Returns the id of a cell whose closure contains p; points on shared faces
// resolve to the lowest incident cell id. Throws std::invalid_argument for
// points outside [0,1]² beyond 1e-12.
int locate_cell(const PolytopalMesh& mesh, Vec2 p);

std::uint64_t mesh_fingerprint(const std::string& kind, int n, CellPointMode mode);

}  // namespace nirb
