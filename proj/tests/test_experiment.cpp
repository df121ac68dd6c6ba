#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "experiment.hpp"

using namespace elwave;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("elwave_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text) {
    if (c == '\n') {
      ++n;
    }
  }
  return n;
}

}  // namespace

TEST_CASE("scheme names round trip and carry the right consistency sign") {
  for (Scheme s : {Scheme::Sipg, Scheme::Nipg, Scheme::Iipg, Scheme::Fem}) {
    CHECK(parse_scheme(scheme_name(s)) == s);
  }
  CHECK(scheme_consistency(Scheme::Sipg) == 1);
  CHECK(scheme_consistency(Scheme::Nipg) == -1);
  CHECK(scheme_consistency(Scheme::Iipg) == 0);
  CHECK_THROWS_AS(scheme_consistency(Scheme::Fem), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheme("dg"), std::invalid_argument);
}

TEST_CASE("config defaults validate and expose the documented card") {
  ExperimentConfig config;
  config.validate();
  CHECK(config.n == 10);
  CHECK(config.p == 2);
  CHECK(config.gamma0 == 1e6);
  CHECK(config.final_time == 1.0);
  const IsotropicMaterial mat = config.material();
  CHECK(mat.lambda == doctest::Approx(55.50373134328358).epsilon(1e-15));
  CHECK(mat.mu == doctest::Approx(26.119402985074626).epsilon(1e-15));

  const std::vector<double> taus = config.convergence_taus();
  REQUIRE(taus.size() == 5);
  CHECK(taus.front() == 1e-1);
  CHECK(taus.back() == doctest::Approx(6.25e-3).epsilon(1e-15));

  const std::vector<double> cond_taus = config.condnum_taus();
  REQUIRE(cond_taus.size() == 16);
  CHECK(cond_taus.back() == doctest::Approx(1e-1 / 32768.0).epsilon(1e-15));

  const std::vector<double> spectral_taus = config.spectrum_taus();
  REQUIRE(spectral_taus.size() == 6);
  CHECK(spectral_taus.front() == 1e-1);
  CHECK(spectral_taus.back() == doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("config validation rejects bad values") {
  ExperimentConfig config;
  config.n = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = ExperimentConfig{};
  config.p = 0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = ExperimentConfig{};
  config.tau = 0.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = ExperimentConfig{};
  config.poisson = 0.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = ExperimentConfig{};
  config.cluster_gap = 1.5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = ExperimentConfig{};
  config.gamma0 = -1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("overrides accept every public key and reject anything else") {
  ExperimentConfig config;
  apply_override(config, "scheme", "nipg");
  CHECK(config.scheme == Scheme::Nipg);
  apply_override(config, "schemes", "sipg, fem");
  REQUIRE(config.schemes.size() == 2);
  CHECK(config.schemes[1] == Scheme::Fem);
  apply_override(config, "p", "1");
  CHECK(config.p == 1);
  apply_override(config, "n", "4");
  CHECK(config.n == 4);
  apply_override(config, "gamma0", "1e4");
  CHECK(config.gamma0 == 1e4);
  apply_override(config, "gamma0_list", "1e3,1e4,1e5");
  REQUIRE(config.gamma0_list.size() == 3);
  apply_override(config, "tau", "0.05");
  CHECK(config.tau == 0.05);
  apply_override(config, "tau_list", "0.1,0.05");
  REQUIRE(config.tau_list.size() == 2);
  apply_override(config, "tau_max", "0.2");
  CHECK(config.tau_max == 0.2);
  apply_override(config, "halvings", "3");
  CHECK(config.halvings == 3);
  apply_override(config, "T", "0.5");
  CHECK(config.final_time == 0.5);
  apply_override(config, "E", "200");
  CHECK(config.young == 200.0);
  apply_override(config, "nu", "0.3");
  CHECK(config.poisson == 0.3);
  apply_override(config, "rho", "7.8");
  CHECK(config.density == 7.8);
  apply_override(config, "solver", "gmres");
  CHECK(config.solver.method == SolverMethod::Gmres);
  apply_override(config, "rel_tolerance", "1e-8");
  CHECK(config.solver.rel_tolerance == 1e-8);
  apply_override(config, "max_iterations", "100");
  CHECK(config.solver.max_iterations == 100);
  apply_override(config, "cluster_gap", "0.05");
  apply_override(config, "condnum_method", "lanczos");
  CHECK(config.condnum_method == EigMethod::Lanczos);
  apply_override(config, "out", "/tmp/x");
  CHECK(config.out_dir == "/tmp/x");
  apply_override(config, "emit_matrix", "/tmp/x/mat");
  apply_override(config, "dump_trajectory", "true");
  CHECK(config.dump_trajectory);

  CHECK_THROWS_AS(apply_override(config, "gamma", "1"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(config, "n", "ten"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(config, "tau", "0.1x"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(config, "dump_trajectory", "maybe"), std::invalid_argument);
}

TEST_CASE("full scale raises the resolution") {
  ExperimentConfig config;
  apply_full_scale(config);
  CHECK(config.n == 40);
  CHECK(config.p == 2);
}

TEST_CASE("config files parse with comments and report bad lines") {
  const fs::path dir = fresh_dir("configfile");
  const fs::path good = dir / "good.cfg";
  {
    std::ofstream out(good);
    out << "# benchmark card\n";
    out << "scheme = fem\n";
    out << "\n";
    out << "n = 6        # coarse\n";
    out << "tau = 2.5e-2\n";
  }
  const ExperimentConfig config = parse_config_file(good.string());
  CHECK(config.scheme == Scheme::Fem);
  CHECK(config.n == 6);
  CHECK(config.tau == 2.5e-2);

  const fs::path bad = dir / "bad.cfg";
  {
    std::ofstream out(bad);
    out << "scheme = sipg\n";
    out << "no_equals_here\n";
  }
  try {
    parse_config_file(bad.string());
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    // the offending line number is part of the message
    CHECK(std::string(e.what()).find(":2:") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_config_file((dir / "missing.cfg").string()), std::runtime_error);
}

TEST_CASE("resolved text lists every key once") {
  ExperimentConfig config;
  config.gamma0_list = {1e3, 1e6};
  const std::string text = config.resolved_text();
  for (const char* key : {"scheme = ", "p = ", "n = ", "gamma0 = ", "tau = ", "tau_max = ",
                          "T = ", "E = ", "nu = ", "rho = ", "solver = ", "cluster_gap = ",
                          "out = ", "gamma0_list = ", "condnum_method = "}) {
    INFO(key);
    CHECK(text.find(key) != std::string::npos);
  }
  // values survive a round trip through the text at full precision
  CHECK(text.find("nu = 0.34") != std::string::npos);
  CHECK(text.find("gamma0_list = 1000,1000000") != std::string::npos);
}

TEST_CASE("scheme systems expose consistent dimensions") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(2);
  const ExperimentConfig config;
  const ProblemData data = manufactured_problem(config.material());

  const SchemeSystem dg(mesh, config.material(), Scheme::Sipg, 1e4, 1, data);
  CHECK(dg.state_size() == 32);  // 4 cells x 4 nodes x 2 components
  CHECK(dg.dg_dofmap() != nullptr);
  CHECK(dg.cg_dofmap() == nullptr);
  CHECK(dg.mass().rows() == 32);
  CHECK(dg.stiffness().rows() == 32);

  // condensed at tau = 0 degenerates to the mass matrix
  const SparseOperator K0 = dg.condensed(0.0);
  CHECK(add_scaled(1.0, K0, -1.0, dg.mass()).max_abs() == 0.0);
  const SparseOperator K = dg.condensed(0.5);
  const SparseOperator expected = add_scaled(1.0, dg.mass(), 0.0625, dg.stiffness());
  CHECK(add_scaled(1.0, K, -1.0, expected).max_abs() <= 1e-15 * expected.max_abs());

  // dG expansion is the identity
  const Eigen::VectorXd state = Eigen::VectorXd::Random(32);
  CHECK((dg.expand(state, 0.3) - state).norm() == 0.0);

  const SchemeSystem fem(mesh, config.material(), Scheme::Fem, 0.0, 1, data);
  // 9 nodes, 8 of them on the boundary: one free node, two components
  CHECK(fem.state_size() == 2);
  CHECK(fem.cg_dofmap() != nullptr);
  CHECK(fem.dg_dofmap() == nullptr);
  const Eigen::VectorXd full = fem.expand(Eigen::VectorXd::Zero(2), 0.25);
  REQUIRE(full.size() == 18);
  // constrained entries carry the boundary data of the manufactured field
  const CgDofMap& cgmap = *fem.cg_dofmap();
  int checked_boundary = 0;
  for (int node = 0; node < cgmap.scalar_nodes(); ++node) {
    if (!cgmap.is_constrained(cgmap.dof(node, 0))) {
      continue;
    }
    const std::array<double, 2> pos = cgmap.node_position(node);
    const Eigen::Vector2d g = data.dirichlet(Eigen::Vector2d(pos[0], pos[1]), 0.25);
    CHECK(full[2 * node] == doctest::Approx(g[0]).epsilon(1e-14));
    CHECK(full[2 * node + 1] == doctest::Approx(g[1]).epsilon(1e-14));
    ++checked_boundary;
  }
  CHECK(checked_boundary == 8);

  CHECK_THROWS_AS(dg.condensed(-1.0), std::invalid_argument);
}

TEST_CASE("initial data interpolate the manufactured field") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(3);
  const ExperimentConfig config;
  const ProblemData data = manufactured_problem(config.material());
  const SchemeSystem sys(mesh, config.material(), Scheme::Sipg, 1e4, 2, data);

  const Eigen::VectorXd u0 = sys.initial_u();
  const Eigen::VectorXd v0 = sys.initial_v();
  const DgDofMap& dofmap = *sys.dg_dofmap();
  CHECK((u0 - dg_interpolate(mesh, dofmap, data.initial_u, 0.0)).norm() == 0.0);
  CHECK((v0 - dg_interpolate(mesh, dofmap, data.initial_v, 0.0)).norm() == 0.0);
  // and the nodal values really are the travelling wave at t = 0
  const Eigen::VectorXd wave =
      dg_interpolate(mesh, dofmap, manufactured_displacement, 0.0);
  CHECK((u0 - wave).norm() == 0.0);
}

TEST_CASE("convergence runner writes its outputs and is deterministic") {
  const fs::path dir = fresh_dir("convergence");
  ExperimentConfig config;
  config.n = 2;
  config.p = 1;
  config.gamma0 = 10.0;
  config.tau_max = 0.25;
  config.halvings = 2;
  config.solver.method = SolverMethod::SparseDirect;
  config.out_dir = dir.string();

  const std::vector<ConvergenceRow> rows = run_convergence(config);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].tau == 0.25);
  CHECK(rows[1].tau == 0.125);
  CHECK(std::isnan(rows[0].eoc));
  for (const ConvergenceRow& row : rows) {
    CHECK(row.error > 0.0);
  }
  // at this resolution the spatial error dominates; just demand boundedness
  CHECK(rows[2].error < 1.0);

  const std::string csv = slurp(dir / "convergence.csv");
  CHECK(csv.rfind("tau,error,eoc\n", 0) == 0);
  CHECK(count_lines(csv) == 4);
  const std::string telemetry = slurp(dir / "telemetry.csv");
  CHECK(telemetry.rfind("tau,step,t,iterations,residual\n", 0) == 0);
  const std::string log = slurp(dir / "experiment.log");
  CHECK(log.find("task = convergence") != std::string::npos);
  CHECK(log.find("n = 2") != std::string::npos);

  // a second run into a fresh directory reproduces the bytes
  const fs::path dir2 = fresh_dir("convergence2");
  config.out_dir = dir2.string();
  run_convergence(config);
  CHECK(slurp(dir2 / "convergence.csv") == csv);
}

TEST_CASE("explicit tau lists override the derived sweep") {
  const fs::path dir = fresh_dir("taulist");
  ExperimentConfig config;
  config.n = 1;
  config.p = 1;
  config.gamma0 = 10.0;
  config.tau_list = {0.5, 0.1};
  config.solver.method = SolverMethod::SparseDirect;
  config.out_dir = dir.string();
  const std::vector<ConvergenceRow> rows = run_convergence(config);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].tau == 0.5);
  CHECK(rows[1].tau == 0.1);
}

TEST_CASE("a fully constrained continuous space is rejected") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(1);
  const ExperimentConfig config;
  const ProblemData data = manufactured_problem(config.material());
  CHECK_THROWS_AS(SchemeSystem(mesh, config.material(), Scheme::Fem, 0.0, 1, data),
                  std::invalid_argument);
}

TEST_CASE("condition number sweep covers the scheme and penalty grid") {
  const fs::path dir = fresh_dir("condnum");
  ExperimentConfig config;
  config.n = 2;
  config.p = 1;
  config.schemes = {Scheme::Sipg, Scheme::Nipg, Scheme::Iipg, Scheme::Fem};
  config.gamma0_list = {1e2, 1e4};
  config.tau_list = {1e-1, 1e-3};
  config.out_dir = dir.string();

  const std::vector<CondnumRow> rows = run_condnum_sweep(config);
  // dG schemes: 3 schemes x 2 gammas x 2 taus; FEM ignores gamma0: 2 taus
  REQUIRE(rows.size() == 14);
  int fem_rows = 0;
  for (const CondnumRow& row : rows) {
    CHECK(row.kappa > 0.0);
    CHECK(row.kappa < 1e12);
    if (row.scheme == Scheme::Fem) {
      ++fem_rows;
      CHECK(row.gamma0 == 0.0);
    }
    if (row.scheme == Scheme::Sipg || row.scheme == Scheme::Fem) {
      CHECK(row.method == "dense");
    } else {
      CHECK(row.method == "svd");
    }
  }
  CHECK(fem_rows == 2);

  // shrinking tau cannot worsen the conditioning of the definite operators
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    const bool spd = rows[i].scheme == Scheme::Sipg || rows[i].scheme == Scheme::Fem;
    if (spd && rows[i].scheme == rows[i + 1].scheme && rows[i].gamma0 == rows[i + 1].gamma0) {
      CHECK(rows[i + 1].kappa <= rows[i].kappa * (1.0 + 1e-12));
    }
  }

  const std::string csv = slurp(dir / "condnum.csv");
  CHECK(csv.rfind("tau,gamma0,scheme,kappa,method,iterations\n", 0) == 0);
  CHECK(count_lines(csv) == 15);
}

TEST_CASE("under-penalized stiffness shows up as an indefinite row") {
  const fs::path dir = fresh_dir("indefinite");
  ExperimentConfig config;
  config.n = 3;
  config.p = 2;
  config.schemes = {Scheme::Sipg};
  config.gamma0_list = {1e-8};
  config.tau_list = {1.0};
  config.out_dir = dir.string();
  const std::vector<CondnumRow> rows = run_condnum_sweep(config);
  REQUIRE(rows.size() == 1);
  CHECK(std::isnan(rows[0].kappa));
  CHECK(rows[0].method == "indefinite");
  const std::string csv = slurp(dir / "condnum.csv");
  CHECK(csv.find("nan") != std::string::npos);
}

TEST_CASE("spectrum study emits labeled clustered spectra") {
  const fs::path dir = fresh_dir("spectrum");
  ExperimentConfig config;
  config.n = 2;
  config.p = 1;
  config.schemes = {Scheme::Sipg, Scheme::Fem};
  config.gamma0 = 1e4;
  config.tau_list = {1e-2, 1e-5};
  config.out_dir = dir.string();

  const std::vector<SpectrumReport> reports = run_spectrum_study(config);
  REQUIRE(reports.size() == 4);
  for (const SpectrumReport& report : reports) {
    CHECK((report.label == "sipg" || report.label == "fem"));
    CHECK(report.n == 2);
    CHECK(report.p == 1);
    if (report.label == "sipg") {
      CHECK(report.gamma0 == 1e4);
      CHECK(report.S == 1);
      CHECK(report.eigenvalues.size() == 32);
    } else {
      CHECK(report.gamma0 == 0.0);
      CHECK(report.eigenvalues.size() == 2);
    }
    CHECK(report.condition_number > 0.0);
  }

  // the tighter step concentrates the sipg spectrum
  const auto compactness = [](const SpectrumReport& r) {
    return cluster_compactness(r.clusters);
  };
  const SpectrumReport* sipg_loose = nullptr;
  const SpectrumReport* sipg_tight = nullptr;
  for (const SpectrumReport& report : reports) {
    if (report.label == "sipg" && report.tau == 1e-2) {
      sipg_loose = &report;
    }
    if (report.label == "sipg" && report.tau == 1e-5) {
      sipg_tight = &report;
    }
  }
  REQUIRE(sipg_loose != nullptr);
  REQUIRE(sipg_tight != nullptr);
  CHECK(compactness(*sipg_tight) < compactness(*sipg_loose));

  const std::string csv = slurp(dir / "spectrum.csv");
  CHECK(csv.rfind("tau,gamma0,scheme,eigenvalue,normalized,cluster_id\n", 0) == 0);
  CHECK(count_lines(csv) == 1 + 32 + 32 + 2 + 2);
}

TEST_CASE("field dump samples the displacement at the nodes") {
  const fs::path dir = fresh_dir("field");
  ExperimentConfig config;
  config.n = 2;
  config.p = 1;
  config.gamma0 = 10.0;
  config.final_time = 0.1;
  config.solver.method = SolverMethod::SparseDirect;
  config.out_dir = dir.string();

  const std::vector<FieldSample> samples = run_field_dump(config, 0.05);
  REQUIRE(samples.size() == 16);  // 4 cells x 4 nodes
  for (const FieldSample& s : samples) {
    CHECK(s.x >= 0.0);
    CHECK(s.x <= 1.0);
    CHECK(s.u_mag == doctest::Approx(std::hypot(s.u1, s.u2)).epsilon(1e-14));
    CHECK(s.v_mag == doctest::Approx(std::hypot(s.v1, s.v2)).epsilon(1e-14));
    // the manufactured displacement is a unit-amplitude sine in each component
    CHECK(s.u_mag <= std::sqrt(2.0) * 1.1);
  }
  const std::string csv = slurp(dir / "field.csv");
  CHECK(csv.rfind("x,y,u1,u2,u_mag,v1,v2,v_mag\n", 0) == 0);
  CHECK(count_lines(csv) == 17);

  // FEM: boundary samples must carry the Dirichlet data exactly
  ExperimentConfig fem = config;
  fem.scheme = Scheme::Fem;
  const fs::path dir2 = fresh_dir("fieldfem");
  fem.out_dir = dir2.string();
  const std::vector<FieldSample> fem_samples = run_field_dump(fem, 0.05);
  REQUIRE(fem_samples.size() == 9);
  const ProblemData data = manufactured_problem(fem.material());
  int boundary = 0;
  for (const FieldSample& s : fem_samples) {
    const bool on_boundary = s.x == 0.0 || s.x == 1.0 || s.y == 0.0 || s.y == 1.0;
    if (on_boundary) {
      ++boundary;
      const Eigen::Vector2d g = data.dirichlet(Eigen::Vector2d(s.x, s.y), fem.final_time);
      CHECK(s.u1 == doctest::Approx(g[0]).epsilon(1e-12));
      CHECK(s.u2 == doctest::Approx(g[1]).epsilon(1e-12));
    }
  }
  CHECK(boundary == 8);
}

TEST_CASE("assemble task exports a readable matrix triple") {
  const fs::path dir = fresh_dir("assemble");
  ExperimentConfig config;
  config.n = 1;
  config.p = 1;
  config.gamma0 = 10.0;
  config.tau = 0.5;
  config.out_dir = dir.string();
  run_assemble(config);

  const SparseOperator M = read_matrix_market((dir / "matrix_M.mtx").string());
  const SparseOperator A = read_matrix_market((dir / "matrix_A.mtx").string());
  const SparseOperator K = read_matrix_market((dir / "matrix_K.mtx").string());
  CHECK(M.rows() == 8);
  const SparseOperator expected = add_scaled(1.0, M, 0.0625, A);
  CHECK(add_scaled(1.0, K, -1.0, expected).max_abs() <= 1e-15 * K.max_abs());

  // the prefix override redirects the files
  ExperimentConfig prefixed = config;
  prefixed.emit_matrix = (dir / "ops").string();
  run_assemble(prefixed);
  CHECK(fs::exists(dir / "ops_M.mtx"));
  CHECK(fs::exists(dir / "ops_A.mtx"));
  CHECK(fs::exists(dir / "ops_K.mtx"));
}

TEST_CASE("trajectory dumps are opt-in") {
  const fs::path dir = fresh_dir("trajectory");
  ExperimentConfig config;
  config.n = 1;
  config.p = 1;
  config.gamma0 = 10.0;
  config.tau_list = {0.5};
  config.final_time = 1.0;
  config.solver.method = SolverMethod::SparseDirect;
  config.dump_trajectory = true;
  config.out_dir = dir.string();
  run_convergence(config);
  CHECK(fs::exists(dir / "trajectory_0.csv"));
  const std::string traj = slurp(dir / "trajectory_0.csv");
  CHECK(traj.rfind("t,dof,u,v\n", 0) == 0);
  // 3 time levels x 8 dofs
  CHECK(count_lines(traj) == 25);
}
