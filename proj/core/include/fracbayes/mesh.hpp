#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Sparse>

namespace fracbayes {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Uniform partition of [x_left, x_right] into n_cells intervals.
class Mesh1D {
 public:
  Mesh1D(double x_left, double x_right, int n_cells);

  double x_left() const { return x_left_; }
  double x_right() const { return x_right_; }
  double length() const { return x_right_ - x_left_; }
  int n_cells() const { return n_cells_; }
  int n_nodes() const { return n_cells_ + 1; }
  double h() const { return h_; }

  double node(int i) const;
  double midpoint(int cell) const;
  const std::vector<double>& nodes() const { return nodes_; }

  bool contains(double x) const { return x >= x_left_ && x <= x_right_; }
  /// Index of the cell containing x; the right end maps to the last cell.
  int locate(double x) const;

  friend bool operator==(const Mesh1D& a, const Mesh1D& b) {
    return a.x_left_ == b.x_left_ && a.x_right_ == b.x_right_ &&
           a.n_cells_ == b.n_cells_;
  }

 private:
  double x_left_;
  double x_right_;
  int n_cells_;
  double h_;
  std::vector<double> nodes_;
};

Mesh1D build_mesh(double x_left, double x_right, int n_cells);

/// Piecewise-constant diffusion coefficient, one strictly positive value per cell.
class Coefficient {
 public:
  explicit Coefficient(std::vector<double> cell_values);

  static Coefficient constant(int n_cells, double value);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t cell) const { return values_[cell]; }

  double lower() const { return lower_; }
  double upper() const { return upper_; }

  Coefficient scaled(double factor) const;

 private:
  std::vector<double> values_;
  double lower_;
  double upper_;
};

struct EllipticityBounds {
  double lower;  // lambda_A
  double upper;  // Lambda_A
};

EllipticityBounds ellipticity_bounds(const Coefficient& a);

/// max over cells of |a - b|.
double sup_distance(const Coefficient& a, const Coefficient& b);

/// P1 stiffness K and consistent mass M of -(a p')' with natural (Neumann)
/// boundary conditions. Both are tridiagonal, symmetric; K annihilates constants.
struct AssembledOperator {
  Mesh1D mesh;
  Coefficient coefficient;
  SparseMatrix stiffness;
  SparseMatrix mass;

  int n_nodes() const { return mesh.n_nodes(); }
};

AssembledOperator assemble(const Mesh1D& mesh, const Coefficient& a);

/// P1 mass matrix alone (coefficient independent).
SparseMatrix assemble_mass(const Mesh1D& mesh);

}  // namespace fracbayes
