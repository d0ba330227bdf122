#include "nirb/nirb.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "nirb/dense.hpp"
#include "nirb/transfer.hpp"

namespace nirb {

int worker_count() {
  if (const char* env = std::getenv("NIRB_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

namespace {

void axpy_field(DiscreteField& y, double alpha, const DiscreteField& x) {
  for (std::size_t i = 0; i < y.cell_values.size(); ++i)
    y.cell_values[i] += alpha * x.cell_values[i];
  for (std::size_t i = 0; i < y.face_values.size(); ++i)
    y.face_values[i] += alpha * x.face_values[i];
}

void scale_field(DiscreteField& y, double s) {
  for (auto& v : y.cell_values) v *= s;
  for (auto& v : y.face_values) v *= s;
}

std::vector<DiscreteField> solve_snapshots(const PolytopalMesh& mesh,
                                           const ParametricProblem& prob,
                                           const std::vector<ParameterVector>& params,
                                           SolverKind kind) {
  const int count = static_cast<int>(params.size());
  std::vector<DiscreteField> out(count);
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out[i] = solve_scheme(kind, mesh, prob, params[i]);
    return out;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          out[i] = solve_scheme(kind, mesh, prob, params[i]);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace

ReducedBasis offline_build(const PolytopalMesh& fine, const ParametricProblem& prob,
                           const std::vector<ParameterVector>& parameters,
                           SolverKind kind) {
  if (parameters.empty())
    throw std::invalid_argument("offline_build: need at least one parameter");
  for (const auto& mu : parameters)
    if (ellipticity_probe(prob, mu) <= 0.0)
      throw NumericalError("offline_build: inadmissible parameter (A not positive)");

  auto snapshots = solve_snapshots(fine, prob, parameters, kind);

  // L2 modified Gram-Schmidt with relative drop tolerance
  std::vector<DiscreteField> span;
  for (auto& snap : snapshots) {
    const double pre = l2_norm(fine, snap);
    for (const auto& b : span) axpy_field(snap, -l2_inner_product(fine, snap, b), b);
    const double post = l2_norm(fine, snap);
    if (post < 1e-10 * pre) continue;  // near-dependent snapshot
    scale_field(snap, 1.0 / post);
    span.push_back(std::move(snap));
  }
  if (span.empty()) throw NumericalError("offline_build: degenerate training set");

  const int n = static_cast<int>(span.size());
  DenseMatrix stiff(n), mass(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      stiff(i, j) = stiffness_form(fine, span[i], span[j]);
      mass(i, j) = l2_inner_product(fine, span[i], span[j]);
    }
  const EigenDecomposition eig = generalized_eigensolve(stiff, mass);

  ReducedBasis basis;
  basis.size = n;
  basis.mesh_kind = fine.kind;
  basis.mesh_n = fine.resolution;
  basis.mesh_mode = fine.mode;
  basis.fine_fingerprint = fine.fingerprint;
  basis.solver_kind = kind;
  basis.eigenvalues = eig.values;
  basis.training_parameters = parameters;
  for (int i = 0; i < n; ++i) {
    DiscreteField phi = span[0];
    scale_field(phi, eig.vectors(0, i));
    for (int j = 1; j < n; ++j) axpy_field(phi, eig.vectors(j, i), span[j]);
    basis.fields.push_back(std::move(phi));
  }
  return basis;
}

NirbApproximation online_solve(const ReducedBasis& basis, const PolytopalMesh& fine,
                               const PolytopalMesh& coarse, const ParametricProblem& prob,
                               const ParameterVector& mu) {
  if (basis.size == 0) throw std::invalid_argument("online_solve: empty basis");
  if (fine.fingerprint != basis.fine_fingerprint)
    throw std::invalid_argument("online_solve: fine mesh does not match basis");
  if (coarse.mesh_size < fine.mesh_size)
    std::fprintf(stderr, "warning: online mesh is finer than the basis mesh (H < h)\n");

  const DiscreteField coarse_sol = solve_scheme(basis.solver_kind, coarse, prob, mu);
  const TransferMap map = build_transfer(fine, coarse);
  NirbApproximation out;
  out.mu = mu;
  out.exact_transfer = map.nested;
  out.coefficients.resize(basis.size);
  for (int i = 0; i < basis.size; ++i) {
    const CrossProduct cp = cross_inner_product(map, fine, coarse_sol, basis.fields[i]);
    out.coefficients[i] = cp.value;
  }
  out.field = combine(basis, fine, out.coefficients);
  return out;
}

double relative_error(const PolytopalMesh& mesh, const DiscreteField& approx,
                      const DiscreteField& reference) {
  // mixed hybrid/cell-only comparisons fall back to the two-point seminorm
  const bool faces = approx.has_faces() && reference.has_faces();
  DiscreteField diff = faces ? approx : cell_field(mesh, approx.cell_values);
  DiscreteField ref = faces ? reference : cell_field(mesh, reference.cell_values);
  for (std::size_t i = 0; i < diff.cell_values.size(); ++i)
    diff.cell_values[i] -= ref.cell_values[i];
  for (std::size_t i = 0; i < diff.face_values.size(); ++i)
    diff.face_values[i] -= ref.face_values[i];
  const double denom = discrete_h1_seminorm(mesh, ref);
  if (denom == 0.0) throw std::invalid_argument("relative_error: zero-norm reference");
  return discrete_h1_seminorm(mesh, diff) / denom;
}

std::vector<double> project_coefficients(const ReducedBasis& basis,
                                         const PolytopalMesh& fine,
                                         const DiscreteField& field) {
  std::vector<double> c(basis.size);
  for (int i = 0; i < basis.size; ++i)
    c[i] = l2_inner_product(fine, field, basis.fields[i]);
  return c;
}

DiscreteField combine(const ReducedBasis& basis, const PolytopalMesh& fine,
                      const std::vector<double>& coefficients) {
  DiscreteField out;
  out.mesh_fingerprint = fine.fingerprint;
  out.cell_values.assign(fine.cells.size(), 0.0);
  const bool faces = !basis.fields.empty() && basis.fields[0].has_faces();
  if (faces) out.face_values.assign(fine.faces.size(), 0.0);
  for (int i = 0; i < basis.size; ++i) axpy_field(out, coefficients[i], basis.fields[i]);
  return out;
}

}  // namespace nirb
