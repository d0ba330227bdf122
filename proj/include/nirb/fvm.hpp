#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nirb/mesh.hpp"
#include "nirb/problem.hpp"
#include "nirb/sparse.hpp"

namespace nirb {

enum class SolverKind { tpfa, hmm };

const char* to_string(SolverKind k);
SolverKind solver_kind_from_string(const std::string& s);

// Element of X_{D,0}: one value per cell, plus one value per face for hybrid
// fields (boundary entries pinned to 0). Cell-only fields have empty
// face_values.
struct DiscreteField {
  std::vector<double> cell_values;
  std::vector<double> face_values;
  std::uint64_t mesh_fingerprint = 0;

  bool has_faces() const { return !face_values.empty(); }
};

DiscreteField cell_field(const PolytopalMesh& mesh, std::vector<double> values);

SparseSpdSystem assemble_tpfa(const PolytopalMesh& mesh, const ParametricProblem& prob,
                              const ParameterVector& mu);

// Hybrid scheme: unknowns are all cells followed by interior faces; boundary
// faces are eliminated as zeros.
SparseSpdSystem assemble_hmm(const PolytopalMesh& mesh, const ParametricProblem& prob,
                             const ParameterVector& mu);

DiscreteField solve_tpfa(const PolytopalMesh& mesh, const ParametricProblem& prob,
                         const ParameterVector& mu);
DiscreteField solve_hmm(const PolytopalMesh& mesh, const ParametricProblem& prob,
                        const ParameterVector& mu);
DiscreteField solve_scheme(SolverKind kind, const PolytopalMesh& mesh,
                           const ParametricProblem& prob, const ParameterVector& mu);

// Hybrid fields use the face-based seminorm; cell-only fields the two-point
// variant (interface value = distance-weighted interpolant of the two cells).
double discrete_h1_seminorm(const PolytopalMesh& mesh, const DiscreteField& v);

double l2_inner_product(const PolytopalMesh& mesh, const DiscreteField& a,
                        const DiscreteField& b);
double l2_norm(const PolytopalMesh& mesh, const DiscreteField& a);

// Piecewise-constant reconstruction evaluated by cell lookup.
double reconstruct_pi(const PolytopalMesh& mesh, const DiscreteField& v, Vec2 p);

// Cell-only field sampling the exact solution at the scheme points x_K.
DiscreteField sample_exact(const PolytopalMesh& mesh, const ParametricProblem& prob);

// Relative L2 error of the cone-wise gradient reconstruction against the
// manufactured gradient (the gradient-energy error of the discretisation).
double gradient_reconstruction_error(const PolytopalMesh& mesh, const DiscreteField& v,
                                     const ParametricProblem& prob);

// Cone-wise reconstructed gradients, one per (cell, local face) pair in cell
// order; exposed for the affine-exactness check.
std::vector<Vec2> reconstruct_gradients(const PolytopalMesh& mesh, const DiscreteField& v);

// Solver-consistent discrete H1 bilinear form with unit diffusion: two-point
// for tpfa fields, the hybrid form for hmm fields.
double stiffness_form(const PolytopalMesh& mesh, const DiscreteField& a,
                      const DiscreteField& b);

// Dense local hybrid matrix of one cell (unknown order: cell then its faces
// in F_K order), with unit diffusion; exposed for spectrum checks.
std::vector<std::vector<double>> hmm_local_matrix(const PolytopalMesh& mesh, int cell);

}  // namespace nirb
