#include "nirb/fvm.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace nirb {

namespace {

constexpr double kSqrtDim = 1.4142135623730951;  // sqrt(d), d = 2

void require_same_mesh(const PolytopalMesh& mesh, const DiscreteField& v) {
  if (v.mesh_fingerprint != mesh.fingerprint)
    throw std::invalid_argument("field is bound to a different mesh");
  if (v.cell_values.size() != mesh.cells.size())
    throw std::invalid_argument("field size does not match mesh");
}

// Interface value closing the two-point seminorm: the distance-weighted
// interpolant of the two adjacent cells, zero on the boundary.
double interface_value(const Face& f, const std::vector<double>& cells) {
  if (f.boundary()) return 0.0;
  const double dk = f.dist[0], dl = f.dist[1];
  return (dl * cells[f.cell[0]] + dk * cells[f.cell[1]]) / (dk + dl);
}

double face_value(const PolytopalMesh& mesh, const DiscreteField& v, int fid) {
  return v.has_faces() ? v.face_values[fid] : interface_value(mesh.faces[fid], v.cell_values);
}

}  // namespace

const char* to_string(SolverKind k) { return k == SolverKind::tpfa ? "tpfa" : "hmm"; }

SolverKind solver_kind_from_string(const std::string& s) {
  if (s == "tpfa") return SolverKind::tpfa;
  if (s == "hmm") return SolverKind::hmm;
  throw std::invalid_argument("unknown scheme: " + s);
}

DiscreteField cell_field(const PolytopalMesh& mesh, std::vector<double> values) {
  if (values.size() != mesh.cells.size())
    throw std::invalid_argument("cell_field: wrong value count");
  DiscreteField f;
  f.cell_values = std::move(values);
  f.mesh_fingerprint = mesh.fingerprint;
  return f;
}

SparseSpdSystem assemble_tpfa(const PolytopalMesh& mesh, const ParametricProblem& prob,
                              const ParameterVector& mu) {
  if (!compute_diagnostics(mesh).superadmissible)
    std::fprintf(stderr, "warning: TPFA on a non-superadmissible mesh (%s n=%d %s)\n",
                 mesh.kind.c_str(), mesh.resolution, to_string(mesh.mode));
  const int nc = static_cast<int>(mesh.cells.size());
  std::vector<double> a_cell(nc);
  for (int k = 0; k < nc; ++k) {
    a_cell[k] = prob.A(mesh.cells[k].point.x, mesh.cells[k].point.y, mu);
    if (a_cell[k] <= 0.0)
      throw NumericalError("assemble_tpfa: nonpositive diffusion coefficient");
  }
  CsrBuilder builder(nc);
  SparseSpdSystem sys;
  sys.rhs.resize(nc);
  for (int k = 0; k < nc; ++k) {
    const Cell& K = mesh.cells[k];
    sys.rhs[k] = K.measure * prob.f(K.point.x, K.point.y, mu);
  }
  for (const auto& f : mesh.faces) {
    if (f.boundary()) {
      const int k = f.cell[0];
      builder.add(k, k, f.measure * a_cell[k] / f.dist[0]);
    } else {
      const int k = f.cell[0], l = f.cell[1];
      const double tau = f.measure * a_cell[l] * a_cell[k] /
                         (a_cell[l] * f.dist[1] + a_cell[k] * f.dist[0]);
      builder.add(k, k, tau);
      builder.add(l, l, tau);
      builder.add(k, l, -tau);
      builder.add(l, k, -tau);
    }
  }
  sys.matrix = builder.build();
  return sys;
}

namespace {

// Local hybrid bilinear form of one cell with diffusion value a_k: consistent
// gradient part |K| a_k grad·grad plus the diagonal stabilization
// (B_K)_{ss} = a_k |sigma|/d_{K,sigma} applied to the residuals R_{K,sigma}.
// Unknown order: cell value, then faces in F_K order.
std::vector<std::vector<double>> local_hybrid_matrix(const PolytopalMesh& mesh, int k,
                                                     double a_k) {
  const Cell& K = mesh.cells[k];
  const int nf = static_cast<int>(K.faces.size());
  const int m = 1 + nf;
  // grad rows: gx, gy per local unknown
  std::vector<double> gx(m, 0.0), gy(m, 0.0);
  for (int l = 0; l < nf; ++l) {
    const Face& f = mesh.faces[K.faces[l]];
    const Vec2 nk = f.normal[f.side_of(k)];
    gx[1 + l] = f.measure * nk.x / K.measure;
    gy[1 + l] = f.measure * nk.y / K.measure;
  }
  std::vector<std::vector<double>> loc(m, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      loc[i][j] = K.measure * a_k * (gx[i] * gx[j] + gy[i] * gy[j]);
  std::vector<double> r(m);
  for (int l = 0; l < nf; ++l) {
    const Face& f = mesh.faces[K.faces[l]];
    const Vec2 dx = f.centroid - K.point;
    for (int i = 0; i < m; ++i) r[i] = -dx.x * gx[i] - dx.y * gy[i];
    r[0] -= 1.0;
    r[1 + l] += 1.0;
    const double w = a_k * f.measure / f.dist[f.side_of(k)];
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) loc[i][j] += w * r[i] * r[j];
  }
  return loc;
}

}  // namespace

std::vector<std::vector<double>> hmm_local_matrix(const PolytopalMesh& mesh, int cell) {
  return local_hybrid_matrix(mesh, cell, 1.0);
}

SparseSpdSystem assemble_hmm(const PolytopalMesh& mesh, const ParametricProblem& prob,
                             const ParameterVector& mu) {
  const int nc = static_cast<int>(mesh.cells.size());
  const int nu = nc + mesh.interior_face_count;
  CsrBuilder builder(nu);
  SparseSpdSystem sys;
  sys.rhs.assign(nu, 0.0);
  for (int k = 0; k < nc; ++k) {
    const Cell& K = mesh.cells[k];
    const double a_k = prob.A(K.centroid.x, K.centroid.y, mu);
    if (a_k <= 0.0) throw NumericalError("assemble_hmm: nonpositive diffusion coefficient");
    sys.rhs[k] = K.measure * prob.f(K.centroid.x, K.centroid.y, mu);
    const auto loc = local_hybrid_matrix(mesh, k, a_k);
    const int nf = static_cast<int>(K.faces.size());
    std::vector<int> gid(1 + nf);
    gid[0] = k;
    for (int l = 0; l < nf; ++l) {
      const Face& f = mesh.faces[K.faces[l]];
      gid[1 + l] = f.boundary() ? -1 : nc + f.interior_id;
    }
    for (int i = 0; i <= nf; ++i) {
      if (gid[i] < 0) continue;
      for (int j = 0; j <= nf; ++j)
        if (gid[j] >= 0) builder.add(gid[i], gid[j], loc[i][j]);
    }
  }
  sys.matrix = builder.build();
  return sys;
}

DiscreteField solve_tpfa(const PolytopalMesh& mesh, const ParametricProblem& prob,
                         const ParameterVector& mu) {
  return cell_field(mesh, solve_spd(assemble_tpfa(mesh, prob, mu)));
}

DiscreteField solve_hmm(const PolytopalMesh& mesh, const ParametricProblem& prob,
                        const ParameterVector& mu) {
  const auto sol = solve_spd(assemble_hmm(mesh, prob, mu));
  const int nc = static_cast<int>(mesh.cells.size());
  DiscreteField v;
  v.mesh_fingerprint = mesh.fingerprint;
  v.cell_values.assign(sol.begin(), sol.begin() + nc);
  v.face_values.assign(mesh.faces.size(), 0.0);
  for (std::size_t f = 0; f < mesh.faces.size(); ++f)
    if (!mesh.faces[f].boundary()) v.face_values[f] = sol[nc + mesh.faces[f].interior_id];
  return v;
}

DiscreteField solve_scheme(SolverKind kind, const PolytopalMesh& mesh,
                           const ParametricProblem& prob, const ParameterVector& mu) {
  return kind == SolverKind::tpfa ? solve_tpfa(mesh, prob, mu)
                                  : solve_hmm(mesh, prob, mu);
}

double discrete_h1_seminorm(const PolytopalMesh& mesh, const DiscreteField& v) {
  require_same_mesh(mesh, v);
  double acc = 0.0;
  if (v.has_faces()) {
    for (std::size_t fid = 0; fid < mesh.faces.size(); ++fid) {
      const Face& f = mesh.faces[fid];
      for (int s = 0; s < 2; ++s) {
        if (f.cell[s] < 0) continue;
        const double diff = v.face_values[fid] - v.cell_values[f.cell[s]];
        acc += f.measure * diff * diff / f.dist[s];
      }
    }
  } else {
    for (const auto& f : mesh.faces) {
      if (f.boundary()) {
        const double vk = v.cell_values[f.cell[0]];
        acc += f.measure * vk * vk / f.dist[0];
      } else {
        const double diff = v.cell_values[f.cell[0]] - v.cell_values[f.cell[1]];
        acc += f.measure * diff * diff / (f.dist[0] + f.dist[1]);
      }
    }
  }
  return std::sqrt(acc);
}

double l2_inner_product(const PolytopalMesh& mesh, const DiscreteField& a,
                        const DiscreteField& b) {
  require_same_mesh(mesh, a);
  require_same_mesh(mesh, b);
  double acc = 0.0;
  for (std::size_t k = 0; k < mesh.cells.size(); ++k)
    acc += mesh.cells[k].measure * a.cell_values[k] * b.cell_values[k];
  return acc;
}

double l2_norm(const PolytopalMesh& mesh, const DiscreteField& a) {
  return std::sqrt(l2_inner_product(mesh, a, a));
}

double reconstruct_pi(const PolytopalMesh& mesh, const DiscreteField& v, Vec2 p) {
  require_same_mesh(mesh, v);
  return v.cell_values[locate_cell(mesh, p)];
}

DiscreteField sample_exact(const PolytopalMesh& mesh, const ParametricProblem& prob) {
  if (!prob.has_exact())
    throw std::invalid_argument("sample_exact: problem has no exact solution");
  std::vector<double> vals(mesh.cells.size());
  for (std::size_t k = 0; k < mesh.cells.size(); ++k)
    vals[k] = prob.exact(mesh.cells[k].point.x, mesh.cells[k].point.y);
  return cell_field(mesh, std::move(vals));
}

std::vector<Vec2> reconstruct_gradients(const PolytopalMesh& mesh, const DiscreteField& v) {
  require_same_mesh(mesh, v);
  std::vector<Vec2> out;
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const Cell& K = mesh.cells[k];
    Vec2 grad_k{0.0, 0.0};
    for (int fid : K.faces) {
      const Face& f = mesh.faces[fid];
      grad_k += (f.measure * face_value(mesh, v, fid) / K.measure) *
                f.normal[f.side_of(static_cast<int>(k))];
    }
    for (int fid : K.faces) {
      const Face& f = mesh.faces[fid];
      const int s = f.side_of(static_cast<int>(k));
      const double res = face_value(mesh, v, fid) - v.cell_values[k] -
                         dot(grad_k, f.centroid - K.point);
      out.push_back(grad_k + (kSqrtDim * res / f.dist[s]) * f.normal[s]);
    }
  }
  return out;
}

double gradient_reconstruction_error(const PolytopalMesh& mesh, const DiscreteField& v,
                                     const ParametricProblem& prob) {
  if (!prob.exact_grad)
    throw std::invalid_argument("gradient_reconstruction_error: no exact gradient");
  const auto grads = reconstruct_gradients(mesh, v);
  double err2 = 0.0, ref2 = 0.0;
  std::size_t cone = 0;
  for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
    const Cell& K = mesh.cells[k];
    for (int fid : K.faces) {
      const Face& f = mesh.faces[fid];
      const int s = f.side_of(static_cast<int>(k));
      const double w = f.measure * f.dist[s] / 2.0;  // cone measure, d = 2
      const Vec2 qp = (K.point + mesh.vertices[f.v0] + mesh.vertices[f.v1]) * (1.0 / 3.0);
      const Vec2 ge = prob.exact_grad(qp.x, qp.y);
      const Vec2 diff = grads[cone++] - ge;
      err2 += w * dot(diff, diff);
      ref2 += w * dot(ge, ge);
    }
  }
  return std::sqrt(err2 / ref2);
}

double stiffness_form(const PolytopalMesh& mesh, const DiscreteField& a,
                      const DiscreteField& b) {
  require_same_mesh(mesh, a);
  require_same_mesh(mesh, b);
  double acc = 0.0;
  if (a.has_faces() && b.has_faces()) {
    for (std::size_t k = 0; k < mesh.cells.size(); ++k) {
      const auto loc = hmm_local_matrix(mesh, static_cast<int>(k));
      const Cell& K = mesh.cells[k];
      const int nf = static_cast<int>(K.faces.size());
      std::vector<double> va(1 + nf), vb(1 + nf);
      va[0] = a.cell_values[k];
      vb[0] = b.cell_values[k];
      for (int l = 0; l < nf; ++l) {
        va[1 + l] = a.face_values[K.faces[l]];
        vb[1 + l] = b.face_values[K.faces[l]];
      }
      for (int i = 0; i <= nf; ++i)
        for (int j = 0; j <= nf; ++j) acc += va[i] * loc[i][j] * vb[j];
    }
  } else {
    for (const auto& f : mesh.faces) {
      if (f.boundary()) {
        acc += f.measure * a.cell_values[f.cell[0]] * b.cell_values[f.cell[0]] / f.dist[0];
      } else {
        const double da = a.cell_values[f.cell[0]] - a.cell_values[f.cell[1]];
        const double db = b.cell_values[f.cell[0]] - b.cell_values[f.cell[1]];
        acc += f.measure * da * db / (f.dist[0] + f.dist[1]);
      }
    }
  }
  return acc;
}

}  // namespace nirb
