#include "nirb/transfer.hpp"

#include <stdexcept>

namespace nirb {

TransferMap build_transfer(const PolytopalMesh& fine, const PolytopalMesh& coarse) {
  TransferMap map;
  map.fine_fingerprint = fine.fingerprint;
  map.coarse_fingerprint = coarse.fingerprint;
  map.fine_to_coarse.resize(fine.cells.size());
  map.nested = true;
  for (std::size_t k = 0; k < fine.cells.size(); ++k) {
    const int target = locate_cell(coarse, fine.cells[k].centroid);
    map.fine_to_coarse[k] = target;
    if (!map.nested) continue;
    for (int v : fine.cells[k].vertices) {
      // a vertex may sit on a coarse face; nested needs only containment in
      // the same coarse cell, and locate_cell tie-breaks can point elsewhere
      Vec2 p = fine.vertices[v];
      const Cell& C = coarse.cells[target];
      const int nv = static_cast<int>(C.vertices.size());
      for (int i = 0; i < nv && map.nested; ++i) {
        const Vec2 a = coarse.vertices[C.vertices[i]];
        const Vec2 b = coarse.vertices[C.vertices[(i + 1) % nv]];
        if (cross(b - a, p - a) / norm(b - a) < -1e-12) map.nested = false;
      }
    }
  }
  return map;
}

CrossProduct cross_inner_product(const TransferMap& map, const PolytopalMesh& fine,
                                 const DiscreteField& coarse_field,
                                 const DiscreteField& fine_field) {
  if (fine_field.mesh_fingerprint != map.fine_fingerprint ||
      coarse_field.mesh_fingerprint != map.coarse_fingerprint)
    throw std::invalid_argument("cross_inner_product: fingerprint mismatch");
  CrossProduct out;
  out.exact = map.nested;
  for (std::size_t k = 0; k < fine.cells.size(); ++k)
    out.value += fine.cells[k].measure * coarse_field.cell_values[map.fine_to_coarse[k]] *
                 fine_field.cell_values[k];
  return out;
}

DiscreteField inject(const TransferMap& map, const PolytopalMesh& fine,
                     const DiscreteField& coarse_field) {
  if (coarse_field.mesh_fingerprint != map.coarse_fingerprint)
    throw std::invalid_argument("inject: fingerprint mismatch");
  std::vector<double> vals(fine.cells.size());
  for (std::size_t k = 0; k < fine.cells.size(); ++k)
    vals[k] = coarse_field.cell_values[map.fine_to_coarse[k]];
  return cell_field(fine, std::move(vals));
}

}  // namespace nirb
