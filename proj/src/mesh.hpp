#pragma once

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace elwave {

enum class FaceKind { Interior, DirichletBoundary, NeumannBoundary };

/// Local side of a cell, in the fixed ordering used by faces_of_cell().
enum class Side { Left = 0, Right = 1, Bottom = 2, Top = 3 };

/// Axis-aligned rectangular cell.
struct Cell {
  int index = -1;
  std::array<double, 2> origin{};   ///< lower-left corner
  std::array<double, 2> extents{};  ///< (dx, dy), both positive
  double diameter = 0.0;            ///< sqrt(dx^2 + dy^2)

  double measure() const { return extents[0] * extents[1]; }
};

/// Mesh face (edge). Interior faces store two adjacent cells; the normal
/// points outward from the plus cell, which is the one with the smaller index.
struct Face {
  int index = -1;
  FaceKind kind = FaceKind::Interior;
  int cell_plus = -1;
  int cell_minus = -1;  ///< -1 on boundary faces
  Side side_plus = Side::Left;
  Side side_minus = Side::Left;
  std::array<double, 2> normal{};
  double measure = 0.0;  ///< edge length
  double h_face = 0.0;   ///< cell extent orthogonal to the face, min over adjacent cells

  bool is_interior() const { return kind == FaceKind::Interior; }
  bool is_boundary() const { return kind != FaceKind::Interior; }
};

/// Structured nx-by-ny partition of [x_min,x_max] x [y_min,y_max] into
/// axis-aligned rectangles, with full cell/face adjacency. Immutable after
/// construction; safe for concurrent read-only use.
class StructuredQuadMesh {
 public:
  StructuredQuadMesh(int nx, int ny, double x_min, double x_max, double y_min, double y_max,
                     bool dirichlet_boundary);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }

  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const Cell& cell(int index) const;

  int interior_face_count() const { return interior_faces_; }
  int boundary_face_count() const { return static_cast<int>(faces_.size()) - interior_faces_; }

  /// Largest cell diameter (uniform here, but kept general).
  double mesh_size() const;

  /// The four faces of a cell in (Left, Right, Bottom, Top) order.
  /// Throws for an unknown cell index.
  std::array<std::pair<const Face*, Side>, 4> faces_of_cell(int cell_index) const;

  /// One-line counts plus geometry, for logs.
  std::string summary() const;

 private:
  int nx_, ny_;
  double x_min_, x_max_, y_min_, y_max_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  std::vector<std::array<int, 4>> cell_faces_;  // per cell, face index by Side
  int interior_faces_ = 0;
};

/// Uniform n x n mesh of the unit square. All boundary faces are Dirichlet
/// when dirichlet_all is set, Neumann otherwise. Throws for n < 1.
StructuredQuadMesh build_unit_square_mesh(int n, bool dirichlet_all = true);

}  // namespace elwave
