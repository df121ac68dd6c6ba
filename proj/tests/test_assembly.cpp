#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "cg.hpp"
#include "dg.hpp"
#include "doctest.h"
#include "elasticity.hpp"
#include "mesh.hpp"
#include "sparse.hpp"

using namespace elwave;

namespace {

const IsotropicMaterial benchmark_material(70.0, 0.34, 2.8);

ProblemData linear_patch_data() {
  // u(x) = (x1 + 2 x2, 3 x1): divergence-free stress, exact in Q1 and Q2
  ProblemData data;
  auto u_lin = [](const Eigen::Vector2d& x, double) {
    return Eigen::Vector2d(x[0] + 2 * x[1], 3 * x[0]);
  };
  auto zero = [](const Eigen::Vector2d&, double) { return Eigen::Vector2d::Zero().eval(); };
  data.forcing = zero;
  data.dirichlet = u_lin;
  data.dirichlet_t = zero;
  data.dirichlet_tt = zero;
  data.initial_u = u_lin;
  data.initial_v = zero;
  return data;
}

double matrix_total(const SparseOperator& A) {
  return A.apply(Eigen::VectorXd::Ones(A.cols())).sum();
}

}  // namespace

TEST_CASE("triplet assembly sums duplicates and validates input") {
  std::vector<Triplet> triplets{{0, 0, 1.0}, {0, 0, 2.0}, {1, 2, -1.5}};
  const SparseOperator A = SparseOperator::from_triplets(2, 3, triplets);
  CHECK(A.rows() == 2);
  CHECK(A.cols() == 3);
  CHECK(A.nonzeros() == 2);
  CHECK(A.to_dense()(0, 0) == 3.0);
  CHECK(A.to_dense()(1, 2) == -1.5);
  CHECK(A.max_abs() == 3.0);

  CHECK_THROWS_AS(SparseOperator::from_triplets(2, 2, {{2, 0, 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(SparseOperator::from_triplets(2, 2, {{0, 0, std::nan("")}}),
                  std::invalid_argument);
}

TEST_CASE("sparse apply and transpose match the dense equivalents") {
  Eigen::MatrixXd dense(3, 3);
  dense << 2, -1, 0, -1, 2, -1, 0, -1, 2;
  const SparseOperator A = SparseOperator::from_dense(dense, true);
  CHECK(A.symmetric_hint());
  CHECK(A.is_symmetric());

  const Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(3, 1.0, 3.0);
  CHECK((A.apply(x) - dense * x).norm() == 0.0);
  CHECK((A.transposed().to_dense() - dense.transpose()).norm() == 0.0);

  const SparseOperator B = add_scaled(2.0, A, -1.0, A);
  CHECK((B.to_dense() - dense).norm() == 0.0);

  Eigen::MatrixXd skew(2, 2);
  skew << 0, 1, -1, 0;
  CHECK_FALSE(SparseOperator::from_dense(skew).is_symmetric());
}

TEST_CASE("CSR views expose the compressed structure") {
  Eigen::MatrixXd dense(2, 2);
  dense << 1, 2, 0, 3;
  const SparseOperator A = SparseOperator::from_dense(dense);
  const int* offsets = A.row_offsets();
  CHECK(offsets[0] == 0);
  CHECK(offsets[1] == 2);
  CHECK(offsets[2] == 3);
  CHECK(A.col_indices()[0] == 0);
  CHECK(A.col_indices()[1] == 1);
  CHECK(A.values()[2] == 3.0);
}

TEST_CASE("Matrix Market writes the exact expected bytes") {
  const std::string path = "mm_golden.mtx";
  Eigen::MatrixXd dense(2, 2);
  dense << 1.5, 0, 0, -2;
  write_matrix_market(SparseOperator::from_dense(dense), path);
  std::ifstream in(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(text ==
        "%%MatrixMarket matrix coordinate real general\n"
        "2 2 2\n"
        "1 1 1.5\n"
        "2 2 -2\n");
  std::filesystem::remove(path);
}

TEST_CASE("Matrix Market round trip preserves values") {
  const std::string path = "mm_roundtrip.mtx";
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(5, 4);
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 4; ++j) {
      if ((i + j) % 2 == 0) {
        dense(i, j) = gauss(rng) * std::pow(10.0, (i - 2) * 3);
      }
    }
  }
  write_matrix_market(SparseOperator::from_dense(dense), path);
  const SparseOperator back = read_matrix_market(path);
  CHECK(back.rows() == 5);
  CHECK(back.cols() == 4);
  CHECK((back.to_dense() - dense).norm() == 0.0);
  std::filesystem::remove(path);

  std::ofstream bad("mm_bad.mtx");
  bad << "%%MatrixMarket matrix array real general\n1 1\n1.0\n";
  bad.close();
  CHECK_THROWS_AS(read_matrix_market("mm_bad.mtx"), std::runtime_error);
  std::filesystem::remove("mm_bad.mtx");
  CHECK_THROWS_AS(read_matrix_market("missing_file.mtx"), std::runtime_error);
}

TEST_CASE("dG mass matrix integrates the density over both components") {
  for (int p : {1, 2}) {
    const StructuredQuadMesh mesh = build_unit_square_mesh(5);
    const DgDofMap dofmap(mesh, p);
    const SparseOperator M = assemble_mass(mesh, dofmap, benchmark_material);
    CHECK(M.rows() == dofmap.total_dofs());
    CHECK(M.symmetric_hint());
    // sum_ij M_ij = rho |Omega| per component
    CHECK(matrix_total(M) == doctest::Approx(2 * 2.8).epsilon(1e-12));
    // exactly symmetric by construction
    CHECK(add_scaled(1.0, M, -1.0, M.transposed()).max_abs() == 0.0);
  }
}

TEST_CASE("dG mass matrix is block diagonal over cells") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(2);
  const DgDofMap dofmap(mesh, 1);
  const SparseOperator M = assemble_mass(mesh, dofmap, benchmark_material);
  const Eigen::MatrixXd dense = M.to_dense();
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = 0; j < dense.cols(); ++j) {
      if (i / dofmap.dofs_per_cell != j / dofmap.dofs_per_cell) {
        CHECK(dense(i, j) == 0.0);
      }
    }
  }
  // vector components never couple in the mass matrix
  for (int i = 0; i < dense.rows(); ++i) {
    for (int j = i % 2 == 0 ? 1 : 0; j < dense.cols(); j += 2) {
      CHECK(dense(i, j) == 0.0);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(dense);
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("penalty value follows the stated formula") {
  const IsotropicMaterial unit_material(1.0, 0.0, 1.0);  // lambda + 2 mu = 1
  Face face;
  face.h_face = 1.0;
  CHECK(penalty_value(face, unit_material, PenaltyConfig{1.0, 1}, 1) == doctest::Approx(2.0));

  face.h_face = 1.0 / 40.0;
  const double expected = 1e6 * 107.74253731343283 * 6.0 * 40.0;
  CHECK(penalty_value(face, benchmark_material, PenaltyConfig{1e6, 1}, 2) ==
        doctest::Approx(expected).epsilon(1e-13));

  // linear in gamma0
  const double base = penalty_value(face, benchmark_material, PenaltyConfig{1.0, 1}, 2);
  CHECK(penalty_value(face, benchmark_material, PenaltyConfig{7.5, 1}, 2) ==
        doctest::Approx(7.5 * base).epsilon(1e-14));

  CHECK_THROWS_AS(PenaltyConfig({0.0, 1}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(PenaltyConfig({1.0, 2}).validate(), std::invalid_argument);
}

TEST_CASE("SIPG stiffness is symmetric to the last bit") {
  for (int p : {1, 2}) {
    const StructuredQuadMesh mesh = build_unit_square_mesh(4);
    const DgDofMap dofmap(mesh, p);
    const SparseOperator A =
        assemble_stiffness_ip(mesh, dofmap, benchmark_material, PenaltyConfig{1e6, 1});
    CHECK(A.symmetric_hint());
    CHECK(add_scaled(1.0, A, -1.0, A.transposed()).max_abs() == 0.0);
  }
}

TEST_CASE("stiffness annihilates rigid body modes on a free boundary") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(3, false);  // all Neumann
  const DgDofMap dofmap(mesh, 2);
  const SparseOperator A =
      assemble_stiffness_ip(mesh, dofmap, benchmark_material, PenaltyConfig{10.0, 1});
  const double scale = A.max_abs();

  auto check_kernel = [&](const FieldFunction& mode) {
    const Eigen::VectorXd coeffs = dg_interpolate(mesh, dofmap, mode, 0.0);
    CHECK(A.apply(coeffs).lpNorm<Eigen::Infinity>() <= 1e-12 * scale);
  };
  check_kernel([](const Eigen::Vector2d&, double) { return Eigen::Vector2d(1.0, 0.0); });
  check_kernel([](const Eigen::Vector2d&, double) { return Eigen::Vector2d(0.0, 1.0); });
  check_kernel([](const Eigen::Vector2d& x, double) { return Eigen::Vector2d(-x[1], x[0]); });
}

TEST_CASE("dG patch test reproduces a linear solution") {
  const ProblemData data = linear_patch_data();
  for (int p : {1, 2}) {
    const StructuredQuadMesh mesh = build_unit_square_mesh(3);
    const DgDofMap dofmap(mesh, p);
    const PenaltyConfig config{10.0, 1};
    const SparseOperator A = assemble_stiffness_ip(mesh, dofmap, benchmark_material, config);
    const Eigen::VectorXd b = assemble_dg_rhs(mesh, dofmap, benchmark_material, config, data, 0.0);
    const Eigen::VectorXd u = Eigen::PartialPivLU<Eigen::MatrixXd>(A.to_dense()).solve(b);
    const Eigen::VectorXd exact = dg_interpolate(mesh, dofmap, data.dirichlet, 0.0);
    CHECK((u - exact).norm() <= 1e-9 * exact.norm());
  }
}

TEST_CASE("penalty scaling moves only the penalty part") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(2);
  const DgDofMap dofmap(mesh, 1);
  StiffnessParts penalty_only;
  penalty_only.volume = penalty_only.consistency = penalty_only.symmetry = false;
  const SparseOperator P = assemble_stiffness_ip(mesh, dofmap, benchmark_material,
                                                 PenaltyConfig{1.0, 1}, penalty_only);
  const SparseOperator A1 =
      assemble_stiffness_ip(mesh, dofmap, benchmark_material, PenaltyConfig{1.0, 1});
  const SparseOperator A5 =
      assemble_stiffness_ip(mesh, dofmap, benchmark_material, PenaltyConfig{5.0, 1});
  const SparseOperator diff = add_scaled(1.0, A5, -1.0, A1);
  const SparseOperator expected = add_scaled(4.0, P, 0.0, P);
  CHECK(add_scaled(1.0, diff, -1.0, expected).max_abs() <= 1e-12 * expected.max_abs());
}

TEST_CASE("NIPG skew part cancels against the penalty-free symmetric part") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(3);
  const DgDofMap dofmap(mesh, 2);
  const SparseOperator A_nipg =
      assemble_stiffness_ip(mesh, dofmap, benchmark_material, PenaltyConfig{10.0, -1});
  StiffnessParts no_flux;
  no_flux.consistency = no_flux.symmetry = false;
  const SparseOperator VP = assemble_stiffness_ip(mesh, dofmap, benchmark_material,
                                                  PenaltyConfig{10.0, -1}, no_flux);
  // A + A^T = 2 (V + P): the consistency term transposes onto the S-term.
  // Only true up to rounding, since the cancellation reorders additions.
  const SparseOperator sym = add_scaled(1.0, A_nipg, 1.0, A_nipg.transposed());
  CHECK(add_scaled(1.0, sym, -2.0, VP).max_abs() <= 1e-14 * VP.max_abs());
}

TEST_CASE("IIPG equals SIPG with the symmetry term disabled") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(2);
  const DgDofMap dofmap(mesh, 2);
  const SparseOperator A_iipg =
      assemble_stiffness_ip(mesh, dofmap, benchmark_material, PenaltyConfig{10.0, 0});
  StiffnessParts no_sym;
  no_sym.symmetry = false;
  const SparseOperator ref = assemble_stiffness_ip(mesh, dofmap, benchmark_material,
                                                   PenaltyConfig{10.0, 1}, no_sym);
  CHECK(add_scaled(1.0, A_iipg, -1.0, ref).max_abs() == 0.0);
}

TEST_CASE("penalized SIPG stiffness is positive definite") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(3);
  const DgDofMap dofmap(mesh, 1);
  const SparseOperator A =
      assemble_stiffness_ip(mesh, dofmap, benchmark_material, PenaltyConfig{10.0, 1});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A.to_dense());
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("dG interpolation is nodal") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(2);
  const DgDofMap dofmap(mesh, 2);
  auto field = [](const Eigen::Vector2d& x, double t) {
    return Eigen::Vector2d(x[0] + t, x[1] * x[1]);
  };
  const Eigen::VectorXd coeffs = dg_interpolate(mesh, dofmap, field, 0.5);
  const TensorBasis basis(2);
  const Cell& cell = mesh.cell(3);
  for (int k = 0; k < basis.size(); ++k) {
    const auto ref = basis.node(k);
    const Eigen::Vector2d x(cell.origin[0] + ref[0] * cell.extents[0],
                            cell.origin[1] + ref[1] * cell.extents[1]);
    CHECK(coeffs[dofmap.global_index(3, k, 0)] == doctest::Approx(field(x, 0.5)[0]));
    CHECK(coeffs[dofmap.global_index(3, k, 1)] == doctest::Approx(field(x, 0.5)[1]));
  }
}

TEST_CASE("trace operators implement the one-sided boundary convention") {
  Face interior;
  interior.kind = FaceKind::Interior;
  interior.cell_minus = 1;
  Face boundary;
  boundary.kind = FaceKind::DirichletBoundary;

  const Eigen::Vector2d plus(3.0, 1.0), minus(1.0, 2.0), g(0.5, 0.25);

  CHECK(jump_value(interior, plus, minus, g) == Eigen::Vector2d(2.0, -1.0));
  CHECK(jump_value(boundary, plus, std::nullopt, g) == Eigen::Vector2d(2.5, 0.75));
  CHECK(jump0_value(interior, plus, minus) == Eigen::Vector2d(2.0, -1.0));
  CHECK(jump0_value(boundary, plus, std::nullopt) == plus);
  CHECK(average_traction(interior, plus, minus) == Eigen::Vector2d(2.0, 1.5));
  CHECK(average_traction(boundary, plus, std::nullopt) == plus);

  CHECK_THROWS_AS(average_traction(interior, plus, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(average_traction(boundary, plus, minus), std::invalid_argument);
}

TEST_CASE("continuous dof map shares nodes and constrains the boundary") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(2);
  const CgDofMap dofmap(mesh, 1);
  CHECK(dofmap.scalar_nodes() == 9);
  CHECK(dofmap.total_dofs() == 18);
  CHECK(dofmap.free_count() == 2);  // only the center node is interior
  CHECK(dofmap.constrained_count() == 16);

  // cell 0 is the lower-left cell; its upper-right local node is the center
  const int center = dofmap.cell_node(0, 3);
  CHECK(dofmap.node_position(center)[0] == doctest::Approx(0.5));
  CHECK(dofmap.node_position(center)[1] == doctest::Approx(0.5));
  CHECK_FALSE(dofmap.is_constrained(dofmap.dof(center, 0)));
  CHECK(dofmap.is_constrained(dofmap.dof(0, 0)));

  // neighboring cells agree on their shared nodes
  CHECK(dofmap.cell_node(0, 1) == dofmap.cell_node(1, 0));
  CHECK(dofmap.cell_node(0, 2) == dofmap.cell_node(2, 0));

  const CgDofMap quadratic(mesh, 2);
  CHECK(quadratic.scalar_nodes() == 25);
  CHECK(quadratic.free_count() == 2 * 9);
}

TEST_CASE("reduced and full vectors round trip") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(2);
  const CgDofMap dofmap(mesh, 1);
  Eigen::VectorXd reduced(2);
  reduced << 3.0, -4.0;
  Eigen::VectorXd boundary = Eigen::VectorXd::LinSpaced(16, 0.0, 15.0);
  const Eigen::VectorXd full = dofmap.to_full(reduced, boundary);
  CHECK(full.size() == 18);
  CHECK((dofmap.restrict_to_free(full) - reduced).norm() == 0.0);
  int b = 0;
  for (int dof : dofmap.constrained_dofs()) {
    CHECK(full[dof] == boundary[b++]);
  }
  CHECK_THROWS_AS(dofmap.to_full(reduced, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_CASE("continuous mass matrix has full and reduced variants") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(5);
  const CgDofMap dofmap(mesh, 2);
  const CgSystem system = assemble_cg(mesh, dofmap, benchmark_material);
  CHECK(system.mass_full.rows() == dofmap.total_dofs());
  CHECK(system.mass.rows() == dofmap.free_count());
  CHECK(matrix_total(system.mass_full) == doctest::Approx(2 * 2.8).epsilon(1e-12));
  CHECK(add_scaled(1.0, system.stiffness, -1.0, system.stiffness.transposed()).max_abs() == 0.0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(system.stiffness.to_dense());
  CHECK(eig.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("continuous patch test reproduces a linear solution") {
  const ProblemData data = linear_patch_data();
  for (int p : {1, 2}) {
    const StructuredQuadMesh mesh = build_unit_square_mesh(3);
    const CgDofMap dofmap(mesh, p);
    const CgSystem system = assemble_cg(mesh, dofmap, benchmark_material);
    const Eigen::VectorXd b = assemble_cg_rhs(mesh, dofmap, system, data, 0.0);
    const Eigen::VectorXd u =
        Eigen::PartialPivLU<Eigen::MatrixXd>(system.stiffness.to_dense()).solve(b);
    const Eigen::VectorXd exact = cg_interpolate_free(dofmap, data.dirichlet, 0.0);
    CHECK((u - exact).norm() <= 1e-10 * exact.norm());
  }
}

TEST_CASE("dirichlet values sample the boundary field in constraint order") {
  const StructuredQuadMesh mesh = build_unit_square_mesh(1);
  const CgDofMap dofmap(mesh, 1);
  CHECK(dofmap.free_count() == 0);
  auto g = [](const Eigen::Vector2d& x, double t) {
    return Eigen::Vector2d(x[0] + 10 * t, x[1]);
  };
  const Eigen::VectorXd values = dirichlet_values(dofmap, g, 0.5);
  REQUIRE(values.size() == 8);
  const Eigen::VectorXd full = dofmap.to_full(Eigen::VectorXd(0), values);
  for (int node = 0; node < 4; ++node) {
    const auto pos = dofmap.node_position(node);
    CHECK(full[dofmap.dof(node, 0)] == doctest::Approx(pos[0] + 5.0));
    CHECK(full[dofmap.dof(node, 1)] == doctest::Approx(pos[1]));
  }
}

TEST_CASE("Neumann data enters the dG load vector") {
  // traction-free rigid translation: the load reduces to the volume term
  const StructuredQuadMesh mesh = build_unit_square_mesh(2, false);
  const DgDofMap dofmap(mesh, 1);
  ProblemData data = homogeneous_problem();
  data.neumann = [](const Eigen::Vector2d&, double, const Eigen::Vector2d& n) {
    return Eigen::Vector2d(n[0], n[1]);
  };
  const Eigen::VectorXd b =
      assemble_dg_rhs(mesh, dofmap, benchmark_material, PenaltyConfig{10.0, 1}, data, 0.0);
  // integral of n over the closed boundary vanishes against constants
  const Eigen::VectorXd ones_x =
      dg_interpolate(mesh, dofmap,
                     [](const Eigen::Vector2d&, double) { return Eigen::Vector2d(1.0, 0.0); },
                     0.0);
  CHECK(b.dot(ones_x) == doctest::Approx(0.0).epsilon(1e-13));
  // but it is nonzero against x . n weights
  CHECK(b.norm() > 1e-10);
}
