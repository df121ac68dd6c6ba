#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cg.hpp"
#include "dg.hpp"
#include "elasticity.hpp"
#include "mesh.hpp"
#include "norms.hpp"
#include "solvers.hpp"
#include "spectrum.hpp"
#include "timeslab.hpp"

namespace elwave {

enum class Scheme { Sipg, Nipg, Iipg, Fem };

std::string scheme_name(Scheme scheme);
Scheme parse_scheme(const std::string& name);
/// Consistency parameter of the interior penalty variant; rejects Fem.
int scheme_consistency(Scheme scheme);

/// Flat experiment parameters. Defaults are the desk-scale card (n = 10,
/// p = 2); full scale raises n to 40.
struct ExperimentConfig {
  Scheme scheme = Scheme::Sipg;
  std::vector<Scheme> schemes;      ///< sweep list; empty means {scheme}
  int p = 2;
  int n = 10;
  double gamma0 = 1e6;
  std::vector<double> gamma0_list;  ///< sweep list; empty means {gamma0}
  double tau = 1.25e-2;             ///< single-run interval length
  std::vector<double> tau_list;     ///< explicit sweep; empty derives a default
  double tau_max = 1e-1;
  int halvings = -1;                ///< -1 picks the per-task default
  double final_time = 1.0;
  double young = 70.0;
  double poisson = 0.34;
  double density = 2.8;
  SolverConfig solver;
  double cluster_gap = 0.02;
  EigMethod condnum_method = EigMethod::Auto;
  std::string out_dir = ".";
  std::string emit_matrix;          ///< Matrix Market path prefix; empty disables
  bool dump_trajectory = false;

  void validate() const;
  IsotropicMaterial material() const;
  std::vector<double> convergence_taus() const;  ///< default: 4 halvings from tau_max
  std::vector<double> condnum_taus() const;      ///< default: 15 halvings from tau_max
  std::vector<double> spectrum_taus() const;     ///< default: decades 1e-1 .. 1e-6
  std::string resolved_text() const;
};

/// key = value lines, # comments, unknown keys rejected.
ExperimentConfig parse_config_file(const std::string& path);
void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value);
void apply_full_scale(ExperimentConfig& config);

/// One spatial discretization (mesh, operators, loads, trace back to full
/// nodal vectors) for a scheme. The mesh must outlive the system.
class SchemeSystem {
 public:
  SchemeSystem(const StructuredQuadMesh& mesh, const IsotropicMaterial& material, Scheme scheme,
               double gamma0, int p, const ProblemData& data);

  Scheme scheme() const { return scheme_; }
  int state_size() const { return M_.rows(); }
  const SparseOperator& mass() const { return M_; }
  const SparseOperator& stiffness() const { return A_; }
  SparseOperator condensed(double tau) const;

  Eigen::VectorXd rhs_at(double t) const;
  Eigen::VectorXd initial_u() const;
  Eigen::VectorXd initial_v() const;
  /// State vector to full nodal coefficients (identity for the dG path; the
  /// continuous path fills constrained nodes from the boundary data).
  Eigen::VectorXd expand(const Eigen::VectorXd& state, double t) const;
  Eigen::VectorXd expand_velocity(const Eigen::VectorXd& state, double t) const;
  const CellGather& gather() const { return gather_; }
  const StructuredQuadMesh& mesh() const { return mesh_; }
  const CgDofMap* cg_dofmap() const { return cg_map_ ? &*cg_map_ : nullptr; }
  const DgDofMap* dg_dofmap() const { return dg_map_ ? &*dg_map_ : nullptr; }

 private:
  const StructuredQuadMesh& mesh_;
  IsotropicMaterial material_;
  Scheme scheme_;
  int p_;
  ProblemData data_;
  std::optional<DgDofMap> dg_map_;
  std::optional<PenaltyConfig> penalty_;
  std::optional<CgDofMap> cg_map_;
  std::optional<CgSystem> cg_sys_;
  SparseOperator M_, A_;
  CellGather gather_;
};

struct ConvergenceRow {
  double tau = 0.0;
  double error = 0.0;
  double eoc = 0.0;  ///< NaN on the first row
};

struct CondnumRow {
  double tau = 0.0;
  double gamma0 = 0.0;
  Scheme scheme = Scheme::Sipg;
  double kappa = 0.0;  ///< NaN when the matrix is indefinite
  std::string method;
  int iterations = 0;
};

struct FieldSample {
  double x = 0.0, y = 0.0;
  double u1 = 0.0, u2 = 0.0, u_mag = 0.0;
  double v1 = 0.0, v2 = 0.0, v_mag = 0.0;
};

/// Manufactured-solution convergence study over the tau sweep; writes
/// convergence.csv, telemetry.csv and experiment.log into out_dir.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config);

/// Condition numbers of K(tau) over (scheme, gamma0, tau); writes
/// condnum.csv and experiment.log. Indefinite points are recorded and the
/// sweep continues.
std::vector<CondnumRow> run_condnum_sweep(const ExperimentConfig& config);

/// Dense spectra with normalization and clustering; writes spectrum.csv and
/// experiment.log.
std::vector<SpectrumReport> run_spectrum_study(const ExperimentConfig& config);

/// One simulation at the given tau; nodal (u, v) at t = T; writes field.csv,
/// telemetry.csv and experiment.log.
std::vector<FieldSample> run_field_dump(const ExperimentConfig& config, double tau);

/// Assemble only: exports M, A and K(tau) in Matrix Market format under the
/// emit prefix (default: out_dir/matrix).
void run_assemble(const ExperimentConfig& config);

}  // namespace elwave
