#pragma once

#include <string>
#include <vector>

#include "nirb/nirb.hpp"

namespace nirb {

struct StudyConfig {
  std::string mesh_kind = "uniform";
  CellPointMode cell_point_mode = CellPointMode::centroid;
  std::vector<int> fine_resolutions;
  int snapshot_count = 5;
  std::uint64_t seed = 42;
  std::string problem = "paper";
  ParameterVector target_mu;
  SolverKind solver_kind = SolverKind::tpfa;
  int reference_factor = 4;
  bool nested = true;
};

StudyConfig parse_study_config(const std::string& json_text);
StudyConfig load_study_config(const std::string& path);

struct StudyRow {
  std::string kind;
  int n_fine = 0;
  int n_coarse = 0;
  double h = 0.0;
  double H = 0.0;
  int basis_size = 0;
  double err_fv_fine = 0.0;
  double err_fv_coarse = 0.0;
  double err_nirb = 0.0;
  double eps_proxy = 0.0;
  double t_offline_s = 0.0;
  double t_online_s = 0.0;
  double t_fine_solve_s = 0.0;
  bool nested = false;
};

struct StudyResult {
  std::vector<StudyRow> rows;
};

// Coarse resolution realizing H^2 ~ h: round(sqrt(n_h)), adjusted down to the
// largest divisor of n_h when a nested pair is requested.
int coarse_resolution(int n_fine, bool nested);

PolytopalMesh build_mesh(const std::string& kind, int n, CellPointMode mode);

// Volume-weighted restriction of a field from a refined mesh onto a coarser
// target (the reference-to-study transfer).
DiscreteField restrict_field(const PolytopalMesh& refined, const PolytopalMesh& target,
                             const DiscreteField& refined_field);

StudyResult run_study(const StudyConfig& config);

void save_basis(const ReducedBasis& basis, const std::string& path);
ReducedBasis load_basis(const std::string& path);

// Writes study.csv and plot.gp into out_dir.
void emit_outputs(const StudyResult& result, const std::string& out_dir);

std::string study_csv_text(const StudyResult& result);
StudyResult parse_study_csv(const std::string& csv_text);

double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Fitted order of the L2 gap between the scheme solution and the exact
// solution sampled at the scheme points, manufactured sine problem.
double superconvergence_order(const std::string& mesh_kind, CellPointMode mode,
                              SolverKind scheme, const std::vector<int>& resolutions);

// Fitted order of the relative gradient-energy error, manufactured sine
// problem on uniform meshes.
double energy_convergence_order(SolverKind scheme, const std::vector<int>& resolutions);

}  // namespace nirb
