#include "nirb/cli.hpp"

#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nirb/harness.hpp"

namespace nirb {

namespace {

ParameterVector parse_mu(const std::string& text) {
  ParameterVector mu;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    const std::string tok = text.substr(pos, comma == std::string::npos ? comma : comma - pos);
    std::size_t used = 0;
    mu.push_back(std::stod(tok, &used));
    if (used != tok.size()) throw CLI::ValidationError("--mu", "malformed number: " + tok);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return mu;
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = text.find(',', pos);
    out.push_back(std::stoi(text.substr(pos, comma == std::string::npos ? comma : comma - pos)));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

void write_field(const PolytopalMesh& mesh, const DiscreteField& field,
                 const ParameterVector& mu, SolverKind scheme, const std::string& path) {
  // single-field container in the basis file layout (N = 1)
  ReducedBasis wrap;
  wrap.size = 1;
  wrap.mesh_kind = mesh.kind;
  wrap.mesh_n = mesh.resolution;
  wrap.mesh_mode = mesh.mode;
  wrap.fine_fingerprint = mesh.fingerprint;
  wrap.solver_kind = scheme;
  wrap.fields.push_back(cell_field(mesh, field.cell_values));
  wrap.training_parameters.push_back(mu);
  save_basis(wrap, path);
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"finite volume solvers with a two-grid reduced basis pipeline"};
  app.require_subcommand(1);

  std::string kind = "uniform", points = "", problem_name = "sine", scheme_name = "tpfa";
  std::string mu_text, config_path, out_path, basis_path, out_dir, csv_path, n_list_text;
  int n = 0, n_coarse = 0;

  auto* mesh_info = app.add_subcommand("mesh-info", "print mesh geometry and diagnostics");
  mesh_info->add_option("--kind", kind)->check(CLI::IsMember({"uniform", "triangular"}));
  mesh_info->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  mesh_info->add_option("--points", points)
      ->check(CLI::IsMember({"centroid", "circumcenter"}));

  auto* solve = app.add_subcommand("solve", "single finite-volume solve");
  solve->add_option("--kind", kind)->check(CLI::IsMember({"uniform", "triangular"}));
  solve->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  solve->add_option("--points", points)->check(CLI::IsMember({"centroid", "circumcenter"}));
  solve->add_option("--problem", problem_name)->check(CLI::IsMember({"paper", "sine"}));
  solve->add_option("--mu", mu_text, "comma-separated parameter values");
  solve->add_option("--scheme", scheme_name)->check(CLI::IsMember({"tpfa", "hmm"}));
  solve->add_option("--out", out_path, "write the solution field (binary)");

  auto* offline = app.add_subcommand("offline", "build and save a reduced basis");
  offline->add_option("--config", config_path)->required();
  offline->add_option("--out", out_path)->required();

  auto* online = app.add_subcommand("online", "coarse solve projected on a saved basis");
  online->add_option("--basis", basis_path)->required();
  online->add_option("--n-coarse", n_coarse)->required()->check(CLI::PositiveNumber);
  online->add_option("--mu", mu_text)->required();
  online->add_option("--out", out_path, "write the combined field (binary)");
  online->add_option("--csv", csv_path, "write per-mode coefficients");

  auto* study = app.add_subcommand("study", "full convergence study");
  study->add_option("--config", config_path)->required();
  study->add_option("--out-dir", out_dir)->required();

  auto* superconv = app.add_subcommand("superconv", "fitted L2 order at scheme points");
  superconv->add_option("--n-list", n_list_text)->required();
  superconv->add_option("--scheme", scheme_name)->check(CLI::IsMember({"tpfa", "hmm"}));
  superconv->add_option("--kind", kind)->check(CLI::IsMember({"uniform", "triangular"}));
  superconv->add_option("--points", points)
      ->check(CLI::IsMember({"centroid", "circumcenter"}));

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;  // help/version exit cleanly, usage errors as 1
  }

  const auto mode_or_default = [&] {
    if (!points.empty()) return cell_point_mode_from_string(points);
    return kind == "triangular" ? CellPointMode::circumcenter : CellPointMode::centroid;
  };

  if (*mesh_info) {
    const PolytopalMesh mesh = build_mesh(kind, n, mode_or_default());
    const MeshDiagnostics d = compute_diagnostics(mesh);
    std::printf("kind=%s n=%d points=%s\n", mesh.kind.c_str(), mesh.resolution,
                to_string(mesh.mode));
    std::printf("cells=%zu faces=%zu interior_faces=%d\n", mesh.cells.size(),
                mesh.faces.size(), mesh.interior_face_count);
    std::printf("h=%.17g theta=%.17g\n", mesh.mesh_size, d.theta);
    std::printf("superadmissible=%s e_max=%.17g e_group_max=%.17g\n",
                d.superadmissible ? "true" : "false", d.e_max, d.e_group_max);
  } else if (*solve) {
    const PolytopalMesh mesh = build_mesh(kind, n, mode_or_default());
    const ParametricProblem prob = problem_by_name(problem_name);
    const ParameterVector mu = mu_text.empty() ? ParameterVector{} : parse_mu(mu_text);
    const SolverKind scheme = solver_kind_from_string(scheme_name);
    const DiscreteField u = solve_scheme(scheme, mesh, prob, mu);
    std::printf("l2_norm=%.17g h1_seminorm=%.17g\n", l2_norm(mesh, u),
                discrete_h1_seminorm(mesh, u));
    if (prob.has_exact()) {
      const DiscreteField up = sample_exact(mesh, prob);
      std::printf("relative_h1_error=%.17g\n", relative_error(mesh, u, up));
    }
    if (!out_path.empty()) write_field(mesh, u, mu, scheme, out_path);
  } else if (*offline) {
    const StudyConfig cfg = load_study_config(config_path);
    const PolytopalMesh fine =
        build_mesh(cfg.mesh_kind, cfg.fine_resolutions.back(), cfg.cell_point_mode);
    const ParametricProblem prob = problem_by_name(cfg.problem);
    const auto params = sample_parameters(cfg.snapshot_count, cfg.seed);
    const ReducedBasis basis = offline_build(fine, prob, params, cfg.solver_kind);
    save_basis(basis, out_path);
    std::printf("basis: N=%d cells=%zu lambda_max=%.17g\n", basis.size,
                basis.fields[0].cell_values.size(), basis.eigenvalues.back());
  } else if (*online) {
    const ReducedBasis basis = load_basis(basis_path);
    const PolytopalMesh fine = build_mesh(basis.mesh_kind, basis.mesh_n, basis.mesh_mode);
    const PolytopalMesh coarse = build_mesh(basis.mesh_kind, n_coarse, basis.mesh_mode);
    // the paper family is the only one stored in bases built by this tool
    const ParametricProblem prob = problem_by_name("paper");
    const NirbApproximation approx =
        online_solve(basis, fine, coarse, prob, parse_mu(mu_text));
    std::printf("coefficients:");
    for (double a : approx.coefficients) std::printf(" %.17g", a);
    std::printf("\nexact_transfer=%s\n", approx.exact_transfer ? "true" : "false");
    if (!out_path.empty())
      write_field(fine, approx.field, approx.mu, basis.solver_kind, out_path);
    if (!csv_path.empty()) {
      std::FILE* f = std::fopen(csv_path.c_str(), "wb");
      if (!f) throw std::invalid_argument("cannot write " + csv_path);
      std::fprintf(f, "i,eigenvalue,alpha\n");
      for (int i = 0; i < basis.size; ++i)
        std::fprintf(f, "%d,%.17g,%.17g\n", i,
                     i < static_cast<int>(basis.eigenvalues.size()) ? basis.eigenvalues[i]
                                                                    : 0.0,
                     approx.coefficients[i]);
      std::fclose(f);
    }
  } else if (*study) {
    const StudyConfig cfg = load_study_config(config_path);
    const StudyResult result = run_study(cfg);
    emit_outputs(result, out_dir);
    for (const auto& r : result.rows)
      std::printf("n=%d nH=%d err_fine=%.3e err_coarse=%.3e err_nirb=%.3e\n", r.n_fine,
                  r.n_coarse, r.err_fv_fine, r.err_fv_coarse, r.err_nirb);
  } else if (*superconv) {
    const double order = superconvergence_order(
        kind, mode_or_default(), solver_kind_from_string(scheme_name),
        parse_int_list(n_list_text));
    std::printf("fitted_l2_order=%.17g\n", order);
  }
  return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args) {
  try {
    return run(args);
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
}

}  // namespace nirb
