#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nirb/fvm.hpp"
#include "nirb/mesh.hpp"
#include "nirb/problem.hpp"

namespace nirb {

struct ReducedBasis {
  int size = 0;  // N after rank handling
  std::string mesh_kind;
  int mesh_n = 0;
  CellPointMode mesh_mode = CellPointMode::centroid;
  std::uint64_t fine_fingerprint = 0;
  SolverKind solver_kind = SolverKind::tpfa;
  std::vector<DiscreteField> fields;   // L2-orthonormal, H1-orthogonal
  std::vector<double> eigenvalues;     // ascending, > 0
  std::vector<ParameterVector> training_parameters;
};

struct NirbApproximation {
  std::vector<double> coefficients;
  DiscreteField field;  // on the fine mesh
  ParameterVector mu;
  bool exact_transfer = true;
};

// Offline stage: fine snapshots for every parameter, L2 modified Gram-Schmidt
// with a 1e-10 relative drop tolerance, then the generalized eigenproblem of
// the unit-diffusion stiffness form against the mass form (Cholesky reduction
// plus cyclic Jacobi), eigenvalues ascending.
ReducedBasis offline_build(const PolytopalMesh& fine, const ParametricProblem& prob,
                           const std::vector<ParameterVector>& parameters,
                           SolverKind kind);

// Online stage: coarse solve, cross-mesh L2 coefficients, fine combination.
// Never calls the fine solver.
NirbApproximation online_solve(const ReducedBasis& basis, const PolytopalMesh& fine,
                               const PolytopalMesh& coarse, const ParametricProblem& prob,
                               const ParameterVector& mu);

// Relative discrete H1-seminorm error against a nonzero reference.
double relative_error(const PolytopalMesh& mesh, const DiscreteField& approx,
                      const DiscreteField& reference);

// L2 projection onto the basis span (cell values).
std::vector<double> project_coefficients(const ReducedBasis& basis,
                                         const PolytopalMesh& fine,
                                         const DiscreteField& field);
DiscreteField combine(const ReducedBasis& basis, const PolytopalMesh& fine,
                      const std::vector<double>& coefficients);

// Worker cap from NIRB_THREADS (0 or unset = hardware concurrency).
int worker_count();

}  // namespace nirb
