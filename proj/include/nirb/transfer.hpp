#pragma once

#include <cstdint>
#include <vector>

#include "nirb/fvm.hpp"
#include "nirb/mesh.hpp"

namespace nirb {

struct TransferMap {
  std::vector<int> fine_to_coarse;  // coarse cell containing each fine centroid
  std::uint64_t fine_fingerprint = 0;
  std::uint64_t coarse_fingerprint = 0;
  bool nested = false;  // every fine cell lies inside one coarse cell
};

struct CrossProduct {
  double value = 0.0;
  bool exact = false;  // false flags the centroid-sampling approximation
};

TransferMap build_transfer(const PolytopalMesh& fine, const PolytopalMesh& coarse);

// Integral of the two piecewise-constant reconstructions over the fine
// partition; exact when the map is nested.
CrossProduct cross_inner_product(const TransferMap& map, const PolytopalMesh& fine,
                                 const DiscreteField& coarse_field,
                                 const DiscreteField& fine_field);

// Copies coarse values onto the fine cells they contain.
DiscreteField inject(const TransferMap& map, const PolytopalMesh& fine,
                     const DiscreteField& coarse_field);

}  // namespace nirb
