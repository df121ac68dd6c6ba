#include "mesh.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace elwave {

StructuredQuadMesh::StructuredQuadMesh(int nx, int ny, double x_min, double x_max, double y_min,
                                       double y_max, bool dirichlet_boundary)
    : nx_(nx), ny_(ny), x_min_(x_min), x_max_(x_max), y_min_(y_min), y_max_(y_max) {
  if (nx < 1 || ny < 1) {
    throw std::invalid_argument("StructuredQuadMesh: need at least one cell per direction");
  }
  if (!(x_max > x_min) || !(y_max > y_min)) {
    throw std::invalid_argument("StructuredQuadMesh: empty domain");
  }

  const double dx = (x_max - x_min) / nx;
  const double dy = (y_max - y_min) / ny;
  const double diam = std::sqrt(dx * dx + dy * dy);

  cells_.reserve(static_cast<std::size_t>(nx) * ny);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      Cell c;
      c.index = j * nx + i;
      c.origin = {x_min + i * dx, y_min + j * dy};
      c.extents = {dx, dy};
      c.diameter = diam;
      cells_.push_back(c);
    }
  }

  const FaceKind boundary_kind =
      dirichlet_boundary ? FaceKind::DirichletBoundary : FaceKind::NeumannBoundary;
  cell_faces_.assign(cells_.size(), {-1, -1, -1, -1});

  auto add_face = [&](FaceKind kind, int cp, Side sp, int cm, Side sm,
                      std::array<double, 2> normal, double measure, double h_face) {
    Face f;
    f.index = static_cast<int>(faces_.size());
    f.kind = kind;
    f.cell_plus = cp;
    f.cell_minus = cm;
    f.side_plus = sp;
    f.side_minus = sm;
    f.normal = normal;
    f.measure = measure;
    f.h_face = h_face;
    faces_.push_back(f);
    cell_faces_[cp][static_cast<int>(sp)] = f.index;
    if (cm >= 0) {
      cell_faces_[cm][static_cast<int>(sm)] = f.index;
    }
    if (kind == FaceKind::Interior) {
      ++interior_faces_;
    }
  };

  // Walk cells row-major; each cell owns its left/bottom boundary faces and
  // its right/top faces (interior ones shared with the next cell). The plus
  // cell of an interior face is the lower-index one, and the normal points
  // out of it.
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int c = j * nx + i;
      if (i == 0) {
        add_face(boundary_kind, c, Side::Left, -1, Side::Left, {-1.0, 0.0}, dy, dx);
      }
      if (i + 1 < nx) {
        add_face(FaceKind::Interior, c, Side::Right, c + 1, Side::Left, {1.0, 0.0}, dy, dx);
      } else {
        add_face(boundary_kind, c, Side::Right, -1, Side::Right, {1.0, 0.0}, dy, dx);
      }
      if (j == 0) {
        add_face(boundary_kind, c, Side::Bottom, -1, Side::Bottom, {0.0, -1.0}, dx, dy);
      }
      if (j + 1 < ny) {
        add_face(FaceKind::Interior, c, Side::Top, c + nx, Side::Bottom, {0.0, 1.0}, dx, dy);
      } else {
        add_face(boundary_kind, c, Side::Top, -1, Side::Top, {0.0, 1.0}, dx, dy);
      }
    }
  }
}

const Cell& StructuredQuadMesh::cell(int index) const {
  if (index < 0 || index >= static_cast<int>(cells_.size())) {
    throw std::out_of_range("StructuredQuadMesh::cell: bad index");
  }
  return cells_[static_cast<std::size_t>(index)];
}

double StructuredQuadMesh::mesh_size() const {
  double h = 0.0;
  for (const Cell& c : cells_) {
    h = std::max(h, c.diameter);
  }
  return h;
}

std::array<std::pair<const Face*, Side>, 4> StructuredQuadMesh::faces_of_cell(
    int cell_index) const {
  if (cell_index < 0 || cell_index >= static_cast<int>(cells_.size())) {
    throw std::out_of_range("StructuredQuadMesh::faces_of_cell: bad index");
  }
  std::array<std::pair<const Face*, Side>, 4> out;
  for (int s = 0; s < 4; ++s) {
    const int fi = cell_faces_[static_cast<std::size_t>(cell_index)][s];
    out[static_cast<std::size_t>(s)] = {&faces_[static_cast<std::size_t>(fi)],
                                        static_cast<Side>(s)};
  }
  return out;
}

std::string StructuredQuadMesh::summary() const {
  const char* bc = "none";
  for (const Face& f : faces_) {
    if (f.kind == FaceKind::DirichletBoundary) {
      bc = "Dirichlet";
      break;
    }
    if (f.kind == FaceKind::NeumannBoundary) {
      bc = "Neumann";
      break;
    }
  }
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "mesh: %d x %d cells on [%g,%g] x [%g,%g], %zu cells, %d interior faces, "
                "%d boundary faces (%s), h = %.6g",
                nx_, ny_, x_min_, x_max_, y_min_, y_max_, cells_.size(), interior_face_count(),
                boundary_face_count(), bc, mesh_size());
  return std::string(buf);
}

StructuredQuadMesh build_unit_square_mesh(int n, bool dirichlet_all) {
  return StructuredQuadMesh(n, n, 0.0, 1.0, 0.0, 1.0, dirichlet_all);
}

}  // namespace elwave
