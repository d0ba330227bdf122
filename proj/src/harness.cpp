#include "nirb/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "nirb/transfer.hpp"

namespace nirb {

namespace {

std::string fmt17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename F>
auto timed(F&& fn, double& seconds) {
  fn();  // discarded cold run
  const auto t0 = std::chrono::steady_clock::now();
  auto result = fn();
  const auto t1 = std::chrono::steady_clock::now();
  seconds = std::chrono::duration<double>(t1 - t0).count();
  return result;
}

}  // namespace

StudyConfig parse_study_config(const std::string& json_text) {
  const auto j = nlohmann::json::parse(json_text);
  StudyConfig c;
  c.mesh_kind = j.value("mesh_kind", c.mesh_kind);
  if (j.contains("cell_point_mode"))
    c.cell_point_mode = cell_point_mode_from_string(j.at("cell_point_mode"));
  else if (c.mesh_kind == "triangular")
    c.cell_point_mode = CellPointMode::circumcenter;
  c.fine_resolutions = j.at("fine_resolutions").get<std::vector<int>>();
  c.snapshot_count = j.value("snapshot_count", c.snapshot_count);
  c.seed = j.value("seed", c.seed);
  c.problem = j.value("problem", c.problem);
  c.target_mu = j.at("target_mu").get<std::vector<double>>();
  if (j.contains("solver_kind"))
    c.solver_kind = solver_kind_from_string(j.at("solver_kind"));
  c.reference_factor = j.value("reference_factor", c.reference_factor);
  c.nested = j.value("nested", c.nested);

  for (std::size_t i = 1; i < c.fine_resolutions.size(); ++i)
    if (c.fine_resolutions[i] <= c.fine_resolutions[i - 1])
      throw std::invalid_argument("study config: resolutions must be strictly increasing");
  if (c.fine_resolutions.empty())
    throw std::invalid_argument("study config: fine_resolutions is empty");
  if (c.snapshot_count < 1) throw std::invalid_argument("study config: snapshot_count < 1");
  if (c.reference_factor < 2)
    throw std::invalid_argument("study config: reference_factor must be >= 2");
  return c;
}

StudyConfig load_study_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_study_config(ss.str());
}

int coarse_resolution(int n_fine, bool nested) {
  const int target = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_fine))));
  if (!nested) return std::max(target, 1);
  int best = 1;
  for (int d = 1; d <= target; ++d)
    if (n_fine % d == 0) best = d;
  return best;
}

PolytopalMesh build_mesh(const std::string& kind, int n, CellPointMode mode) {
  if (kind == "uniform") return build_uniform_rect_mesh(n);
  if (kind == "triangular") return build_triangular_mesh(n, mode);
  throw std::invalid_argument("unknown mesh kind: " + kind);
}

DiscreteField restrict_field(const PolytopalMesh& refined, const PolytopalMesh& target,
                             const DiscreteField& refined_field) {
  const TransferMap map = build_transfer(refined, target);
  std::vector<double> acc(target.cells.size(), 0.0), vol(target.cells.size(), 0.0);
  for (std::size_t k = 0; k < refined.cells.size(); ++k) {
    acc[map.fine_to_coarse[k]] += refined.cells[k].measure * refined_field.cell_values[k];
    vol[map.fine_to_coarse[k]] += refined.cells[k].measure;
  }
  for (std::size_t k = 0; k < acc.size(); ++k) acc[k] /= vol[k];
  return cell_field(target, std::move(acc));
}

StudyResult run_study(const StudyConfig& config) {
  const ParametricProblem prob = problem_by_name(config.problem);
  const auto training = sample_parameters(config.snapshot_count, config.seed);
  // one extra draw from the same stream serves as the held-out parameter
  const auto heldout_mu = sample_parameters(config.snapshot_count + 1, config.seed).back();

  StudyResult result;
  for (const int n_fine : config.fine_resolutions) {
    const int n_coarse = coarse_resolution(n_fine, config.nested);
    const PolytopalMesh fine = build_mesh(config.mesh_kind, n_fine, config.cell_point_mode);
    const PolytopalMesh coarse =
        build_mesh(config.mesh_kind, n_coarse, config.cell_point_mode);

    StudyRow row;
    row.kind = config.mesh_kind;
    row.n_fine = n_fine;
    row.n_coarse = n_coarse;
    row.h = fine.mesh_size;
    row.H = coarse.mesh_size;

    ReducedBasis basis;
    try {
      basis = timed(
          [&] { return offline_build(fine, prob, training, config.solver_kind); },
          row.t_offline_s);
      row.basis_size = basis.size;

      const DiscreteField fine_sol = timed(
          [&] { return solve_scheme(config.solver_kind, fine, prob, config.target_mu); },
          row.t_fine_solve_s);
      const NirbApproximation nirb_sol = timed(
          [&] { return online_solve(basis, fine, coarse, prob, config.target_mu); },
          row.t_online_s);
      row.nested = nirb_sol.exact_transfer;

      const DiscreteField coarse_sol =
          solve_scheme(config.solver_kind, coarse, prob, config.target_mu);

      const PolytopalMesh refined = build_mesh(
          config.mesh_kind, config.reference_factor * n_fine, config.cell_point_mode);
      const DiscreteField reference =
          solve_scheme(config.solver_kind, refined, prob, config.target_mu);
      const DiscreteField ref_fine = restrict_field(refined, fine, reference);
      const DiscreteField ref_coarse = restrict_field(refined, coarse, reference);

      row.err_fv_fine = relative_error(fine, fine_sol, ref_fine);
      row.err_nirb = relative_error(fine, nirb_sol.field, ref_fine);
      row.err_fv_coarse = relative_error(coarse, coarse_sol, ref_coarse);

      const DiscreteField heldout =
          solve_scheme(config.solver_kind, fine, prob, heldout_mu);
      const DiscreteField projected =
          combine(basis, fine, project_coefficients(basis, fine, heldout));
      DiscreteField residual = cell_field(fine, heldout.cell_values);
      for (std::size_t k = 0; k < residual.cell_values.size(); ++k)
        residual.cell_values[k] -= projected.cell_values[k];
      row.eps_proxy = l2_norm(fine, residual) / l2_norm(fine, heldout);
    } catch (const NumericalError& e) {
      throw NumericalError("study row n_fine=" + std::to_string(n_fine) + ": " + e.what());
    }
    result.rows.push_back(row);
  }
  return result;
}

namespace {

void put_u64_le(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_u64_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return v;
}

}  // namespace

void save_basis(const ReducedBasis& basis, const std::string& path) {
  nlohmann::json meta;
  meta["mesh_kind"] = basis.mesh_kind;
  meta["n"] = basis.mesh_n;
  meta["cell_point_mode"] = to_string(basis.mesh_mode);
  meta["solver_kind"] = to_string(basis.solver_kind);
  meta["N"] = basis.size;
  meta["cell_count"] =
      basis.fields.empty() ? 0 : static_cast<int>(basis.fields[0].cell_values.size());
  auto& eig = meta["eigenvalues"] = nlohmann::json::array();
  for (double v : basis.eigenvalues) eig.push_back(fmt17(v));
  auto& train = meta["training_parameters"] = nlohmann::json::array();
  for (const auto& mu : basis.training_parameters) {
    nlohmann::json row = nlohmann::json::array();
    for (double v : mu) row.push_back(fmt17(v));
    train.push_back(row);
  }
  const std::string meta_text = meta.dump();

  std::string blob = "NIRBB001";
  put_u64_le(blob, meta_text.size());
  blob += meta_text;
  for (const auto& field : basis.fields)
    for (double v : field.cell_values) {
      std::uint64_t bits;
      std::memcpy(&bits, &v, 8);
      put_u64_le(blob, bits);
    }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::invalid_argument("save_basis: cannot open " + path);
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

ReducedBasis load_basis(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::invalid_argument("load_basis: cannot open " + path);
  std::string blob((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(blob.data());
  if (blob.size() < 16 || blob.compare(0, 8, "NIRBB001") != 0)
    throw std::invalid_argument("load_basis: bad magic");
  const std::uint64_t meta_len = get_u64_le(p + 8);
  if (blob.size() < 16 + meta_len) throw std::invalid_argument("load_basis: truncated metadata");
  const auto meta = nlohmann::json::parse(blob.substr(16, meta_len));

  ReducedBasis basis;
  basis.mesh_kind = meta.at("mesh_kind");
  basis.mesh_n = meta.at("n");
  basis.mesh_mode = cell_point_mode_from_string(meta.at("cell_point_mode"));
  basis.solver_kind = solver_kind_from_string(meta.at("solver_kind"));
  basis.size = meta.at("N");
  const std::size_t cells = meta.at("cell_count").get<std::size_t>();
  basis.fine_fingerprint = mesh_fingerprint(basis.mesh_kind, basis.mesh_n, basis.mesh_mode);
  for (const auto& s : meta.at("eigenvalues"))
    basis.eigenvalues.push_back(std::strtod(s.get<std::string>().c_str(), nullptr));
  for (const auto& row : meta.at("training_parameters")) {
    ParameterVector mu;
    for (const auto& s : row) mu.push_back(std::strtod(s.get<std::string>().c_str(), nullptr));
    basis.training_parameters.push_back(std::move(mu));
  }

  const std::size_t payload = blob.size() - 16 - meta_len;
  if (payload != static_cast<std::size_t>(basis.size) * cells * 8)
    throw std::invalid_argument("load_basis: metadata/payload size mismatch");
  const unsigned char* q = p + 16 + meta_len;
  for (int i = 0; i < basis.size; ++i) {
    DiscreteField f;
    f.mesh_fingerprint = basis.fine_fingerprint;
    f.cell_values.resize(cells);
    for (std::size_t k = 0; k < cells; ++k, q += 8) {
      const std::uint64_t bits = get_u64_le(q);
      std::memcpy(&f.cell_values[k], &bits, 8);
    }
    basis.fields.push_back(std::move(f));
  }
  return basis;
}

std::string study_csv_text(const StudyResult& result) {
  std::string out =
      "kind,n_fine,n_coarse,h,H,N,err_fv_fine,err_fv_coarse,err_nirb,eps_proxy,"
      "t_offline_s,t_online_s,t_fine_solve_s,nested\n";
  for (const auto& r : result.rows) {
    out += r.kind + ',' + std::to_string(r.n_fine) + ',' + std::to_string(r.n_coarse) +
           ',' + fmt17(r.h) + ',' + fmt17(r.H) + ',' + std::to_string(r.basis_size) +
           ',' + fmt17(r.err_fv_fine) + ',' + fmt17(r.err_fv_coarse) + ',' +
           fmt17(r.err_nirb) + ',' + fmt17(r.eps_proxy) + ',' + fmt17(r.t_offline_s) +
           ',' + fmt17(r.t_online_s) + ',' + fmt17(r.t_fine_solve_s) + ',' +
           (r.nested ? "true" : "false") + '\n';
  }
  return out;
}

StudyResult parse_study_csv(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("empty study csv");
  StudyResult result;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    std::vector<std::string> cols;
    while (std::getline(ls, tok, ',')) cols.push_back(tok);
    if (cols.size() != 14) throw std::invalid_argument("study csv: bad column count");
    StudyRow r;
    r.kind = cols[0];
    r.n_fine = std::stoi(cols[1]);
    r.n_coarse = std::stoi(cols[2]);
    r.h = std::strtod(cols[3].c_str(), nullptr);
    r.H = std::strtod(cols[4].c_str(), nullptr);
    r.basis_size = std::stoi(cols[5]);
    r.err_fv_fine = std::strtod(cols[6].c_str(), nullptr);
    r.err_fv_coarse = std::strtod(cols[7].c_str(), nullptr);
    r.err_nirb = std::strtod(cols[8].c_str(), nullptr);
    r.eps_proxy = std::strtod(cols[9].c_str(), nullptr);
    r.t_offline_s = std::strtod(cols[10].c_str(), nullptr);
    r.t_online_s = std::strtod(cols[11].c_str(), nullptr);
    r.t_fine_solve_s = std::strtod(cols[12].c_str(), nullptr);
    r.nested = cols[13] == "true";
    result.rows.push_back(std::move(r));
  }
  return result;
}

void emit_outputs(const StudyResult& result, const std::string& out_dir) {
  if (result.rows.empty()) throw std::invalid_argument("emit_outputs: empty result");
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  {
    std::ofstream csv(fs::path(out_dir) / "study.csv", std::ios::binary);
    if (!csv) throw std::invalid_argument("emit_outputs: cannot write study.csv");
    csv << study_csv_text(result);
  }
  std::ofstream gp(fs::path(out_dir) / "plot.gp", std::ios::binary);
  if (!gp) throw std::invalid_argument("emit_outputs: cannot write plot.gp");
  gp << "# log-log error curves from study.csv\n"
        "set datafile separator ','\n"
        "set logscale xy\n"
        "set xlabel 'h'\n"
        "set ylabel 'relative H1 error'\n"
        "set key left top\n"
        "plot 'study.csv' using 'h':'err_fv_fine' with linespoints title 'err_fv_fine', \\\n"
        "     'study.csv' using 'h':'err_fv_coarse' with linespoints title 'err_fv_coarse', \\\n"
        "     'study.csv' using 'h':'err_nirb' with linespoints title 'err_nirb'\n";
}

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_loglog_slope: need matching series of length >= 2");
  const std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double superconvergence_order(const std::string& mesh_kind, CellPointMode mode,
                              SolverKind scheme, const std::vector<int>& resolutions) {
  const ParametricProblem prob = manufactured_sine_problem();
  std::vector<double> hs, errs;
  for (int n : resolutions) {
    const PolytopalMesh mesh = build_mesh(mesh_kind, n, mode);
    const DiscreteField uh = solve_scheme(scheme, mesh, prob, {});
    const DiscreteField up = sample_exact(mesh, prob);
    DiscreteField diff = cell_field(mesh, uh.cell_values);
    for (std::size_t k = 0; k < diff.cell_values.size(); ++k)
      diff.cell_values[k] -= up.cell_values[k];
    hs.push_back(mesh.mesh_size);
    errs.push_back(l2_norm(mesh, diff) / l2_norm(mesh, up));
  }
  return fit_loglog_slope(hs, errs);
}

double energy_convergence_order(SolverKind scheme, const std::vector<int>& resolutions) {
  const ParametricProblem prob = manufactured_sine_problem();
  std::vector<double> hs, errs;
  for (int n : resolutions) {
    const PolytopalMesh mesh = build_uniform_rect_mesh(n);
    const DiscreteField uh = solve_scheme(scheme, mesh, prob, {});
    hs.push_back(mesh.mesh_size);
    errs.push_back(gradient_reconstruction_error(mesh, uh, prob));
  }
  return fit_loglog_slope(hs, errs);
}

}  // namespace nirb
