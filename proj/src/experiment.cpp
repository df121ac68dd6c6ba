#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace elwave {

namespace {

std::string fmt17(double v) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) {
    return "";
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::stringstream stream(s);
  std::string item;
  while (std::getline(stream, item, ',')) {
    item = trim(item);
    if (!item.empty()) {
      items.push_back(item);
    }
  }
  return items;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse number '" + value + "'");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return v;
  } catch (const std::exception&) {
    throw std::invalid_argument("config key '" + key + "': cannot parse integer '" + value +
                                "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes" || value == "on") return true;
  if (value == "false" || value == "0" || value == "no" || value == "off") return false;
  throw std::invalid_argument("config key '" + key + "': cannot parse boolean '" + value + "'");
}

EigMethod parse_eig_method(const std::string& value) {
  if (value == "auto") return EigMethod::Auto;
  if (value == "dense") return EigMethod::Dense;
  if (value == "lanczos") return EigMethod::Lanczos;
  throw std::invalid_argument("unknown eigenvalue method '" + value +
                              "' (expected auto, dense or lanczos)");
}

std::string eig_method_name(EigMethod m) {
  switch (m) {
    case EigMethod::Auto:
      return "auto";
    case EigMethod::Dense:
      return "dense";
    case EigMethod::Lanczos:
      return "lanczos";
  }
  return "unknown";
}

std::vector<double> halving_sequence(double tau_max, int halvings) {
  std::vector<double> taus;
  taus.reserve(static_cast<std::size_t>(halvings) + 1);
  double tau = tau_max;
  for (int i = 0; i <= halvings; ++i) {
    taus.push_back(tau);
    tau *= 0.5;
  }
  return taus;
}

std::vector<double> uniform_grid(double final_time, double tau) {
  const long long steps = std::max<long long>(1, std::llround(final_time / tau));
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (long long i = 0; i <= steps; ++i) {
    grid[static_cast<std::size_t>(i)] =
        final_time * static_cast<double>(i) / static_cast<double>(steps);
  }
  return grid;
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  long long ms() const {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path + " for writing");
  }
  for (const std::string& line : lines) {
    out << line << "\n";
  }
  if (!out) {
    throw std::runtime_error("write failed for " + path);
  }
}

void write_log(const ExperimentConfig& cfg, const std::string& task,
               const std::vector<std::string>& extra) {
  std::vector<std::string> lines;
  lines.push_back("task = " + task);
  std::stringstream resolved(cfg.resolved_text());
  std::string line;
  while (std::getline(resolved, line)) {
    lines.push_back(line);
  }
  lines.insert(lines.end(), extra.begin(), extra.end());
  write_lines(std::filesystem::path(cfg.out_dir) / "experiment.log", lines);
}

void write_telemetry(const std::string& path,
                     const std::vector<std::array<double, 5>>& rows) {
  std::vector<std::string> lines;
  lines.reserve(rows.size() + 1);
  lines.push_back("tau,step,t,iterations,residual");
  for (const auto& r : rows) {
    lines.push_back(fmt17(r[0]) + "," + std::to_string(static_cast<long long>(r[1])) + "," +
                    fmt17(r[2]) + "," + std::to_string(static_cast<long long>(r[3])) + "," +
                    fmt17(r[4]));
  }
  write_lines(path, lines);
}

void write_trajectory(const std::string& path, const Trajectory& traj) {
  std::vector<std::string> lines;
  lines.push_back("t,dof,u,v");
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    for (Eigen::Index d = 0; d < traj.u[i].size(); ++d) {
      lines.push_back(fmt17(traj.times[i]) + "," + std::to_string(d) + "," +
                      fmt17(traj.u[i][d]) + "," + fmt17(traj.v[i][d]));
    }
  }
  write_lines(path, lines);
}

void emit_matrices(const SchemeSystem& sys, const ExperimentConfig& cfg) {
  if (cfg.emit_matrix.empty()) {
    return;
  }
  write_matrix_market(sys.mass(), cfg.emit_matrix + "_M.mtx");
  write_matrix_market(sys.stiffness(), cfg.emit_matrix + "_A.mtx");
  write_matrix_market(sys.condensed(cfg.tau), cfg.emit_matrix + "_K.mtx");
}

FieldFunction exact_displacement_field() {
  return [](const Eigen::Vector2d& x, double t) { return manufactured_displacement(x, t); };
}

}  // namespace

std::string scheme_name(Scheme scheme) {
  switch (scheme) {
    case Scheme::Sipg:
      return "sipg";
    case Scheme::Nipg:
      return "nipg";
    case Scheme::Iipg:
      return "iipg";
    case Scheme::Fem:
      return "fem";
  }
  return "unknown";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "sipg") return Scheme::Sipg;
  if (name == "nipg") return Scheme::Nipg;
  if (name == "iipg") return Scheme::Iipg;
  if (name == "fem") return Scheme::Fem;
  throw std::invalid_argument("unknown scheme '" + name +
                              "' (expected sipg, nipg, iipg or fem)");
}

int scheme_consistency(Scheme scheme) {
  switch (scheme) {
    case Scheme::Sipg:
      return 1;
    case Scheme::Nipg:
      return -1;
    case Scheme::Iipg:
      return 0;
    case Scheme::Fem:
      break;
  }
  throw std::invalid_argument("scheme_consistency: fem has no consistency parameter");
}

void ExperimentConfig::validate() const {
  if (p < 1) {
    throw std::invalid_argument("config: p must be >= 1");
  }
  if (n < 1) {
    throw std::invalid_argument("config: n must be >= 1");
  }
  if (!(gamma0 > 0.0)) {
    throw std::invalid_argument("config: gamma0 must be positive");
  }
  for (double g : gamma0_list) {
    if (!(g > 0.0)) {
      throw std::invalid_argument("config: gamma0_list entries must be positive");
    }
  }
  if (!(tau > 0.0) || !(tau_max > 0.0)) {
    throw std::invalid_argument("config: tau and tau_max must be positive");
  }
  for (double t : tau_list) {
    if (!(t > 0.0)) {
      throw std::invalid_argument("config: tau_list entries must be positive");
    }
  }
  if (halvings < -1) {
    throw std::invalid_argument("config: halvings must be >= 0 (or -1 for the default)");
  }
  if (!(final_time > 0.0)) {
    throw std::invalid_argument("config: T must be positive");
  }
  if (!(young > 0.0) || !(poisson > -1.0 && poisson < 0.5) || !(density > 0.0)) {
    throw std::invalid_argument("config: material parameters out of range");
  }
  solver.validate();
  if (!(cluster_gap > 0.0 && cluster_gap < 1.0)) {
    throw std::invalid_argument("config: cluster_gap must lie in (0, 1)");
  }
}

IsotropicMaterial ExperimentConfig::material() const {
  return IsotropicMaterial(young, poisson, density);
}

std::vector<double> ExperimentConfig::convergence_taus() const {
  if (!tau_list.empty()) {
    return tau_list;
  }
  return halving_sequence(tau_max, halvings >= 0 ? halvings : 4);
}

std::vector<double> ExperimentConfig::condnum_taus() const {
  if (!tau_list.empty()) {
    return tau_list;
  }
  return halving_sequence(tau_max, halvings >= 0 ? halvings : 15);
}

std::vector<double> ExperimentConfig::spectrum_taus() const {
  if (!tau_list.empty()) {
    return tau_list;
  }
  if (halvings >= 0) {
    return halving_sequence(tau_max, halvings);
  }
  return {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

std::string ExperimentConfig::resolved_text() const {
  std::vector<std::string> lines;
  lines.push_back("scheme = " + scheme_name(scheme));
  if (!schemes.empty()) {
    std::string s;
    for (std::size_t i = 0; i < schemes.size(); ++i) {
      s += (i ? "," : "") + scheme_name(schemes[i]);
    }
    lines.push_back("schemes = " + s);
  }
  lines.push_back("p = " + std::to_string(p));
  lines.push_back("n = " + std::to_string(n));
  lines.push_back("gamma0 = " + fmt17(gamma0));
  if (!gamma0_list.empty()) {
    std::string s;
    for (std::size_t i = 0; i < gamma0_list.size(); ++i) {
      s += (i ? "," : "") + fmt17(gamma0_list[i]);
    }
    lines.push_back("gamma0_list = " + s);
  }
  lines.push_back("tau = " + fmt17(tau));
  if (!tau_list.empty()) {
    std::string s;
    for (std::size_t i = 0; i < tau_list.size(); ++i) {
      s += (i ? "," : "") + fmt17(tau_list[i]);
    }
    lines.push_back("tau_list = " + s);
  }
  lines.push_back("tau_max = " + fmt17(tau_max));
  lines.push_back("halvings = " + std::to_string(halvings));
  lines.push_back("T = " + fmt17(final_time));
  lines.push_back("E = " + fmt17(young));
  lines.push_back("nu = " + fmt17(poisson));
  lines.push_back("rho = " + fmt17(density));
  lines.push_back("solver = " + solver_method_name(solver.method));
  lines.push_back("rel_tolerance = " + fmt17(solver.rel_tolerance));
  lines.push_back("max_iterations = " + std::to_string(solver.max_iterations));
  lines.push_back("cluster_gap = " + fmt17(cluster_gap));
  lines.push_back("condnum_method = " + eig_method_name(condnum_method));
  lines.push_back("out = " + out_dir);
  if (!emit_matrix.empty()) {
    lines.push_back("emit_matrix = " + emit_matrix);
  }
  lines.push_back(std::string("dump_trajectory = ") + (dump_trajectory ? "true" : "false"));
  std::string text;
  for (const std::string& line : lines) {
    text += line + "\n";
  }
  return text;
}

void apply_override(ExperimentConfig& config, const std::string& key, const std::string& value) {
  if (key == "scheme") {
    config.scheme = parse_scheme(value);
  } else if (key == "schemes") {
    config.schemes.clear();
    for (const std::string& item : split_list(value)) {
      config.schemes.push_back(parse_scheme(item));
    }
  } else if (key == "p") {
    config.p = parse_int(key, value);
  } else if (key == "n") {
    config.n = parse_int(key, value);
  } else if (key == "gamma0") {
    config.gamma0 = parse_double(key, value);
  } else if (key == "gamma0_list") {
    config.gamma0_list.clear();
    for (const std::string& item : split_list(value)) {
      config.gamma0_list.push_back(parse_double(key, item));
    }
  } else if (key == "tau") {
    config.tau = parse_double(key, value);
  } else if (key == "tau_list") {
    config.tau_list.clear();
    for (const std::string& item : split_list(value)) {
      config.tau_list.push_back(parse_double(key, item));
    }
  } else if (key == "tau_max") {
    config.tau_max = parse_double(key, value);
  } else if (key == "halvings") {
    config.halvings = parse_int(key, value);
  } else if (key == "T") {
    config.final_time = parse_double(key, value);
  } else if (key == "E") {
    config.young = parse_double(key, value);
  } else if (key == "nu") {
    config.poisson = parse_double(key, value);
  } else if (key == "rho") {
    config.density = parse_double(key, value);
  } else if (key == "solver") {
    config.solver.method = parse_solver_method(value);
  } else if (key == "rel_tolerance") {
    config.solver.rel_tolerance = parse_double(key, value);
  } else if (key == "max_iterations") {
    config.solver.max_iterations = parse_int(key, value);
  } else if (key == "cluster_gap") {
    config.cluster_gap = parse_double(key, value);
  } else if (key == "condnum_method") {
    config.condnum_method = parse_eig_method(value);
  } else if (key == "out") {
    config.out_dir = value;
  } else if (key == "emit_matrix") {
    config.emit_matrix = value;
  } else if (key == "dump_trajectory") {
    config.dump_trajectory = parse_bool(key, value);
  } else {
    throw std::invalid_argument(
        "unknown config key '" + key +
        "' (known keys: scheme, schemes, p, n, gamma0, gamma0_list, tau, tau_list, tau_max, "
        "halvings, T, E, nu, rho, solver, rel_tolerance, max_iterations, cluster_gap, "
        "condnum_method, out, emit_matrix, dump_trajectory)");
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path);
  }
  ExperimentConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      apply_override(config, key, value);
    } catch (const std::exception& e) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return config;
}

void apply_full_scale(ExperimentConfig& config) { config.n = 40; }

SchemeSystem::SchemeSystem(const StructuredQuadMesh& mesh, const IsotropicMaterial& material,
                           Scheme scheme, double gamma0, int p, const ProblemData& data)
    : mesh_(mesh), material_(material), scheme_(scheme), p_(p), data_(data) {
  if (scheme == Scheme::Fem) {
    cg_map_.emplace(mesh, p);
    if (cg_map_->free_count() == 0) {
      throw std::invalid_argument(
          "SchemeSystem: every continuous node is constrained; refine the mesh or raise p");
    }
    cg_sys_ = assemble_cg(mesh, *cg_map_, material_);
    M_ = cg_sys_->mass;
    A_ = cg_sys_->stiffness;
    gather_ = cg_gather(*cg_map_);
  } else {
    dg_map_.emplace(mesh, p);
    penalty_ = PenaltyConfig{gamma0, scheme_consistency(scheme)};
    penalty_->validate();
    M_ = assemble_mass(mesh, *dg_map_, material_);
    A_ = assemble_stiffness_ip(mesh, *dg_map_, material_, *penalty_);
    gather_ = dg_gather(*dg_map_);
  }
}

SparseOperator SchemeSystem::condensed(double tau) const {
  if (!(tau >= 0.0)) {
    throw std::invalid_argument("SchemeSystem::condensed: tau must be non-negative");
  }
  return add_scaled(1.0, M_, 0.25 * tau * tau, A_);
}

Eigen::VectorXd SchemeSystem::rhs_at(double t) const {
  if (scheme_ == Scheme::Fem) {
    return assemble_cg_rhs(mesh_, *cg_map_, *cg_sys_, data_, t);
  }
  return assemble_dg_rhs(mesh_, *dg_map_, material_, *penalty_, data_, t);
}

Eigen::VectorXd SchemeSystem::initial_u() const {
  if (!data_.initial_u) {
    return Eigen::VectorXd::Zero(state_size());
  }
  if (scheme_ == Scheme::Fem) {
    return cg_interpolate_free(*cg_map_, data_.initial_u, 0.0);
  }
  return dg_interpolate(mesh_, *dg_map_, data_.initial_u, 0.0);
}

Eigen::VectorXd SchemeSystem::initial_v() const {
  if (!data_.initial_v) {
    return Eigen::VectorXd::Zero(state_size());
  }
  if (scheme_ == Scheme::Fem) {
    return cg_interpolate_free(*cg_map_, data_.initial_v, 0.0);
  }
  return dg_interpolate(mesh_, *dg_map_, data_.initial_v, 0.0);
}

Eigen::VectorXd SchemeSystem::expand(const Eigen::VectorXd& state, double t) const {
  if (scheme_ == Scheme::Fem) {
    return cg_map_->to_full(state, dirichlet_values(*cg_map_, data_.dirichlet, t));
  }
  return state;
}

Eigen::VectorXd SchemeSystem::expand_velocity(const Eigen::VectorXd& state, double t) const {
  if (scheme_ == Scheme::Fem) {
    return cg_map_->to_full(state, dirichlet_values(*cg_map_, data_.dirichlet_t, t));
  }
  return state;
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const StructuredQuadMesh mesh = build_unit_square_mesh(cfg.n, true);
  const IsotropicMaterial material = cfg.material();
  const ProblemData data = manufactured_problem(material);
  const SchemeSystem sys(mesh, material, cfg.scheme, cfg.gamma0, cfg.p, data);
  emit_matrices(sys, cfg);

  const std::vector<double> taus = cfg.convergence_taus();
  const FieldFunction exact = exact_displacement_field();
  SlabProblem problem{&sys.mass(), &sys.stiffness(),
                      [&sys](double t) { return sys.rhs_at(t); }};

  std::vector<ConvergenceRow> rows;
  std::vector<std::array<double, 5>> telemetry;
  std::vector<std::string> log;
  log.push_back(mesh.summary());

  for (std::size_t ti = 0; ti < taus.size(); ++ti) {
    Stopwatch watch;
    const std::vector<double> grid = uniform_grid(cfg.final_time, taus[ti]);
    const double tau_actual = grid[1] - grid[0];
    const Trajectory traj =
        run(grid, problem, sys.initial_u(), sys.initial_v(), cfg.solver, StepPath::Condensed);

    std::vector<Eigen::VectorXd> full;
    full.reserve(traj.u.size());
    for (std::size_t i = 0; i < traj.u.size(); ++i) {
      full.push_back(sys.expand(traj.u[i], grid[i]));
    }
    const double error = l2l2_error(grid, full, exact, mesh, cfg.p, sys.gather());

    ConvergenceRow row;
    row.tau = tau_actual;
    row.error = error;
    row.eoc = std::numeric_limits<double>::quiet_NaN();
    if (!rows.empty()) {
      row.eoc = std::log(rows.back().error / error) / std::log(rows.back().tau / tau_actual);
    }
    rows.push_back(row);

    for (std::size_t s = 0; s < traj.stats.size(); ++s) {
      telemetry.push_back({tau_actual, static_cast<double>(s), grid[s + 1],
                           static_cast<double>(traj.stats[s].iterations),
                           traj.stats[s].relative_residual});
    }
    if (cfg.dump_trajectory) {
      write_trajectory(std::filesystem::path(cfg.out_dir) /
                           ("trajectory_" + std::to_string(ti) + ".csv"),
                       traj);
    }
    log.push_back("tau " + fmt17(tau_actual) + ": error " + fmt17(error) + ", eoc " +
                  fmt17(row.eoc) + ", " + std::to_string(grid.size() - 1) + " steps, " +
                  std::to_string(watch.ms()) + " ms");
  }

  std::vector<std::string> lines;
  lines.push_back("tau,error,eoc");
  for (const ConvergenceRow& row : rows) {
    lines.push_back(fmt17(row.tau) + "," + fmt17(row.error) + "," + fmt17(row.eoc));
  }
  write_lines(std::filesystem::path(cfg.out_dir) / "convergence.csv", lines);
  write_telemetry(std::filesystem::path(cfg.out_dir) / "telemetry.csv", telemetry);
  write_log(cfg, "convergence", log);
  return rows;
}

std::vector<CondnumRow> run_condnum_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const StructuredQuadMesh mesh = build_unit_square_mesh(cfg.n, true);
  const IsotropicMaterial material = cfg.material();
  const ProblemData data = manufactured_problem(material);
  const std::vector<double> taus = cfg.condnum_taus();
  const std::vector<Scheme> schemes =
      cfg.schemes.empty() ? std::vector<Scheme>{cfg.scheme} : cfg.schemes;

  std::vector<CondnumRow> rows;
  std::vector<std::string> log;
  log.push_back(mesh.summary());
  bool emitted = false;

  for (Scheme scheme : schemes) {
    const std::vector<double> gammas =
        scheme == Scheme::Fem
            ? std::vector<double>{0.0}
            : (cfg.gamma0_list.empty() ? std::vector<double>{cfg.gamma0} : cfg.gamma0_list);
    for (double gamma : gammas) {
      Stopwatch assembly_watch;
      const SchemeSystem sys(mesh, material, scheme,
                             scheme == Scheme::Fem ? cfg.gamma0 : gamma, cfg.p, data);
      if (!emitted) {
        emit_matrices(sys, cfg);
        emitted = true;
      }
      log.push_back(scheme_name(scheme) + " gamma0 " + fmt17(gamma) + ": assembled " +
                    std::to_string(sys.state_size()) + " dofs in " +
                    std::to_string(assembly_watch.ms()) + " ms");
      for (double tau : taus) {
        Stopwatch watch;
        const SparseOperator K = sys.condensed(tau);
        CondnumRow row;
        row.tau = tau;
        row.gamma0 = gamma;
        row.scheme = scheme;
        if (scheme == Scheme::Sipg || scheme == Scheme::Fem) {
          try {
            const CondNumResult r = condition_number_spd(K, cfg.condnum_method);
            row.kappa = r.kappa;
            row.method = r.method;
            row.iterations = r.iterations;
          } catch (const IndefiniteMatrixError& e) {
            row.kappa = std::numeric_limits<double>::quiet_NaN();
            row.method = "indefinite";
            row.iterations = 0;
            log.push_back("  tau " + fmt17(tau) + ": indefinite (" + e.what() + ")");
          }
        } else {
          try {
            row.kappa = condition_number_general(K);
            row.method = "svd";
          } catch (const std::runtime_error& e) {
            row.kappa = std::numeric_limits<double>::quiet_NaN();
            row.method = "singular";
            log.push_back("  tau " + fmt17(tau) + ": " + e.what());
          }
        }
        rows.push_back(row);
        log.push_back("  tau " + fmt17(tau) + ": kappa " + fmt17(row.kappa) + " (" +
                      row.method + ", " + std::to_string(watch.ms()) + " ms)");
      }
    }
  }

  std::vector<std::string> lines;
  lines.push_back("tau,gamma0,scheme,kappa,method,iterations");
  for (const CondnumRow& row : rows) {
    lines.push_back(fmt17(row.tau) + "," + fmt17(row.gamma0) + "," + scheme_name(row.scheme) +
                    "," + fmt17(row.kappa) + "," + row.method + "," +
                    std::to_string(row.iterations));
  }
  write_lines(std::filesystem::path(cfg.out_dir) / "condnum.csv", lines);
  write_log(cfg, "condnum", log);
  return rows;
}

std::vector<SpectrumReport> run_spectrum_study(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const StructuredQuadMesh mesh = build_unit_square_mesh(cfg.n, true);
  const IsotropicMaterial material = cfg.material();
  const ProblemData data = manufactured_problem(material);
  const std::vector<double> taus = cfg.spectrum_taus();
  const std::vector<Scheme> schemes =
      cfg.schemes.empty() ? std::vector<Scheme>{cfg.scheme} : cfg.schemes;

  std::vector<SpectrumReport> reports;
  std::vector<std::string> log;
  log.push_back(mesh.summary());
  bool emitted = false;

  for (Scheme scheme : schemes) {
    const SchemeSystem sys(mesh, material, scheme, cfg.gamma0, cfg.p, data);
    if (!emitted) {
      emit_matrices(sys, cfg);
      emitted = true;
    }
    for (double tau : taus) {
      Stopwatch watch;
      SpectrumReport report = analyze_spectrum(sys.condensed(tau), cfg.cluster_gap);
      report.label = scheme_name(scheme);
      report.tau = tau;
      report.gamma0 = scheme == Scheme::Fem ? 0.0 : cfg.gamma0;
      report.S = scheme == Scheme::Fem ? 0 : scheme_consistency(scheme);
      report.p = cfg.p;
      report.n = cfg.n;
      log.push_back(scheme_name(scheme) + " tau " + fmt17(tau) + ": " +
                    std::to_string(report.clusters.size()) + " clusters, compactness " +
                    fmt17(cluster_compactness(report.clusters)) + ", kappa " +
                    fmt17(report.condition_number) + ", " + std::to_string(watch.ms()) + " ms");
      reports.push_back(std::move(report));
    }
  }

  std::vector<std::string> lines;
  lines.push_back("tau,gamma0,scheme,eigenvalue,normalized,cluster_id");
  for (const SpectrumReport& report : reports) {
    for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) {
      lines.push_back(fmt17(report.tau) + "," + fmt17(report.gamma0) + "," + report.label +
                      "," + fmt17(report.eigenvalues[i]) + "," + fmt17(report.normalized[i]) +
                      "," + std::to_string(report.cluster_ids[i]));
    }
  }
  write_lines(std::filesystem::path(cfg.out_dir) / "spectrum.csv", lines);
  write_log(cfg, "spectrum", log);
  return reports;
}

std::vector<FieldSample> run_field_dump(const ExperimentConfig& cfg, double tau) {
  cfg.validate();
  if (!(tau > 0.0)) {
    throw std::invalid_argument("run_field_dump: tau must be positive");
  }
  std::filesystem::create_directories(cfg.out_dir);
  const StructuredQuadMesh mesh = build_unit_square_mesh(cfg.n, true);
  const IsotropicMaterial material = cfg.material();
  const ProblemData data = manufactured_problem(material);
  const SchemeSystem sys(mesh, material, cfg.scheme, cfg.gamma0, cfg.p, data);
  emit_matrices(sys, cfg);

  SlabProblem problem{&sys.mass(), &sys.stiffness(),
                      [&sys](double t) { return sys.rhs_at(t); }};
  const std::vector<double> grid = uniform_grid(cfg.final_time, tau);
  Stopwatch watch;
  const Trajectory traj =
      run(grid, problem, sys.initial_u(), sys.initial_v(), cfg.solver, StepPath::Condensed);

  const double T = grid.back();
  const Eigen::VectorXd u_full = sys.expand(traj.u.back(), T);
  const Eigen::VectorXd v_full = sys.expand_velocity(traj.v.back(), T);

  std::vector<FieldSample> samples;
  auto push_sample = [&](double x, double y, double u1, double u2, double v1, double v2) {
    FieldSample s;
    s.x = x;
    s.y = y;
    s.u1 = u1;
    s.u2 = u2;
    s.u_mag = std::hypot(u1, u2);
    s.v1 = v1;
    s.v2 = v2;
    s.v_mag = std::hypot(v1, v2);
    samples.push_back(s);
  };

  if (const DgDofMap* dofmap = sys.dg_dofmap()) {
    const TensorBasis basis(cfg.p);
    for (const Cell& cell : mesh.cells()) {
      for (int k = 0; k < basis.size(); ++k) {
        const auto ref = basis.node(k);
        push_sample(cell.origin[0] + ref[0] * cell.extents[0],
                    cell.origin[1] + ref[1] * cell.extents[1],
                    u_full[dofmap->global_index(cell.index, k, 0)],
                    u_full[dofmap->global_index(cell.index, k, 1)],
                    v_full[dofmap->global_index(cell.index, k, 0)],
                    v_full[dofmap->global_index(cell.index, k, 1)]);
      }
    }
  } else {
    const CgDofMap* cg_map = sys.cg_dofmap();
    for (int node = 0; node < cg_map->scalar_nodes(); ++node) {
      const auto pos = cg_map->node_position(node);
      push_sample(pos[0], pos[1], u_full[cg_map->dof(node, 0)], u_full[cg_map->dof(node, 1)],
                  v_full[cg_map->dof(node, 0)], v_full[cg_map->dof(node, 1)]);
    }
  }

  std::vector<std::array<double, 5>> telemetry;
  for (std::size_t s = 0; s < traj.stats.size(); ++s) {
    telemetry.push_back({grid[1] - grid[0], static_cast<double>(s), grid[s + 1],
                         static_cast<double>(traj.stats[s].iterations),
                         traj.stats[s].relative_residual});
  }
  if (cfg.dump_trajectory) {
    write_trajectory(std::filesystem::path(cfg.out_dir) / "trajectory.csv", traj);
  }

  std::vector<std::string> lines;
  lines.push_back("x,y,u1,u2,u_mag,v1,v2,v_mag");
  for (const FieldSample& s : samples) {
    lines.push_back(fmt17(s.x) + "," + fmt17(s.y) + "," + fmt17(s.u1) + "," + fmt17(s.u2) +
                    "," + fmt17(s.u_mag) + "," + fmt17(s.v1) + "," + fmt17(s.v2) + "," +
                    fmt17(s.v_mag));
  }
  write_lines(std::filesystem::path(cfg.out_dir) / "field.csv", lines);
  write_telemetry(std::filesystem::path(cfg.out_dir) / "telemetry.csv", telemetry);
  write_log(cfg, "field",
            {mesh.summary(),
             "tau " + fmt17(grid[1] - grid[0]) + ": " + std::to_string(grid.size() - 1) +
                 " steps, " + std::to_string(watch.ms()) + " ms"});
  return samples;
}

void run_assemble(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const StructuredQuadMesh mesh = build_unit_square_mesh(cfg.n, true);
  const IsotropicMaterial material = cfg.material();
  const ProblemData data = manufactured_problem(material);
  const SchemeSystem sys(mesh, material, cfg.scheme, cfg.gamma0, cfg.p, data);

  const std::string prefix =
      cfg.emit_matrix.empty()
          ? (std::filesystem::path(cfg.out_dir) / "matrix").string()
          : cfg.emit_matrix;
  Stopwatch watch;
  write_matrix_market(sys.mass(), prefix + "_M.mtx");
  write_matrix_market(sys.stiffness(), prefix + "_A.mtx");
  write_matrix_market(sys.condensed(cfg.tau), prefix + "_K.mtx");
  write_log(cfg, "assemble",
            {mesh.summary(),
             "wrote " + prefix + "_M.mtx, _A.mtx, _K.mtx (K at tau " + fmt17(cfg.tau) + ") in " +
                 std::to_string(watch.ms()) + " ms"});
}

}  // namespace elwave
