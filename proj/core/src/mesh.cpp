#include "fracbayes/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fracbayes/error.hpp"

namespace fracbayes {

Mesh1D::Mesh1D(double x_left, double x_right, int n_cells)
    : x_left_(x_left), x_right_(x_right), n_cells_(n_cells) {
  detail::require(std::isfinite(x_left) && std::isfinite(x_right),
                  "mesh endpoints must be finite");
  detail::require(x_left < x_right, "mesh requires x_left < x_right");
  detail::require(n_cells >= 2, "mesh requires at least 2 cells, got " +
                                    std::to_string(n_cells));
  h_ = (x_right - x_left) / n_cells;
  nodes_.resize(static_cast<std::size_t>(n_cells) + 1);
  for (int i = 0; i <= n_cells; ++i) {
    nodes_[i] = x_left + (x_right - x_left) * i / n_cells;
  }
  nodes_.back() = x_right;
}

double Mesh1D::node(int i) const { return nodes_.at(static_cast<std::size_t>(i)); }

double Mesh1D::midpoint(int cell) const {
  return 0.5 * (node(cell) + node(cell + 1));
}

int Mesh1D::locate(double x) const {
  detail::require(contains(x), "point " + std::to_string(x) + " lies outside the mesh");
  auto cell = static_cast<int>(std::floor((x - x_left_) / h_));
  return std::clamp(cell, 0, n_cells_ - 1);
}

Mesh1D build_mesh(double x_left, double x_right, int n_cells) {
  return Mesh1D(x_left, x_right, n_cells);
}

Coefficient::Coefficient(std::vector<double> cell_values) : values_(std::move(cell_values)) {
  detail::require(!values_.empty(), "coefficient needs at least one cell value");
  for (double v : values_) {
    detail::require(std::isfinite(v) && v > 0.0,
                    "coefficient cell values must be finite and positive");
  }
  auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  lower_ = *lo;
  upper_ = *hi;
}

Coefficient Coefficient::constant(int n_cells, double value) {
  detail::require(n_cells > 0, "coefficient needs at least one cell");
  return Coefficient(std::vector<double>(static_cast<std::size_t>(n_cells), value));
}

Coefficient Coefficient::scaled(double factor) const {
  std::vector<double> v(values_);
  for (double& x : v) x *= factor;
  return Coefficient(std::move(v));
}

EllipticityBounds ellipticity_bounds(const Coefficient& a) { return {a.lower(), a.upper()}; }

double sup_distance(const Coefficient& a, const Coefficient& b) {
  detail::require(a.size() == b.size(), "coefficients live on different meshes");
  double d = 0.0;
  for (std::size_t c = 0; c < a.size(); ++c) d = std::max(d, std::abs(a[c] - b[c]));
  return d;
}

namespace {

SparseMatrix tridiagonal(const std::vector<double>& diag, const std::vector<double>& off) {
  const auto n = static_cast<Eigen::Index>(diag.size());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(3 * diag.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    triplets.emplace_back(i, i, diag[i]);
    if (i + 1 < n) {
      triplets.emplace_back(i, i + 1, off[i]);
      triplets.emplace_back(i + 1, i, off[i]);
    }
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

}  // namespace

SparseMatrix assemble_mass(const Mesh1D& mesh) {
  const int n = mesh.n_nodes();
  std::vector<double> diag(n, 0.0), off(n - 1, 0.0);
  const double h = mesh.h();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    diag[c] += h / 3.0;
    diag[c + 1] += h / 3.0;
    off[c] += h / 6.0;
  }
  return tridiagonal(diag, off);
}

AssembledOperator assemble(const Mesh1D& mesh, const Coefficient& a) {
  detail::require(static_cast<int>(a.size()) == mesh.n_cells(),
                  "coefficient has " + std::to_string(a.size()) + " cells, mesh has " +
                      std::to_string(mesh.n_cells()));
  const int n = mesh.n_nodes();
  std::vector<double> diag(n, 0.0), off(n - 1, 0.0);
  const double h = mesh.h();
  for (int c = 0; c < mesh.n_cells(); ++c) {
    const double k = a[c] / h;
    diag[c] += k;
    diag[c + 1] += k;
    off[c] -= k;
  }
  return AssembledOperator{mesh, a, tridiagonal(diag, off), assemble_mass(mesh)};
}

}  // namespace fracbayes
