#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>

#include "fracbayes/mesh.hpp"
#include "fracbayes/spectral.hpp"

namespace fracbayes {

/// Tensor grid on D x (0, y_max) for the degenerate extension problem
/// div(y^a B grad P) = 0, a = 1 - 2s. The y-nodes follow
/// y_j = y_max (j / n_levels)^grading, clustering at y = 0.
struct ExtensionGrid {
  Mesh1D base;
  std::vector<double> y_nodes;
  double a_exponent;
  double s;

  int nx() const { return base.n_nodes(); }
  int ny() const { return static_cast<int>(y_nodes.size()); }
  /// y^a evaluated at the midpoint of y-cell j.
  double weight(int j) const;
};

ExtensionGrid make_extension_grid(const Mesh1D& base, double s, int n_levels,
                                  double y_max = 8.0, double grading = 3.0);

/// Nodal values P(x_i, y_j), stored level by level (x fastest).
class ExtensionField {
 public:
  ExtensionField(int nx, int ny, Eigen::VectorXd values);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double at(int i, int j) const { return values_[static_cast<Eigen::Index>(j) * nx_ + i]; }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd level(int j) const;
  Eigen::VectorXd trace() const { return level(0); }

 private:
  int nx_;
  int ny_;
  Eigen::VectorXd values_;
};

/// 2^{1-2s} Gamma(1-s) / Gamma(s): the Neumann-datum scaling for which the
/// extension trace reproduces the spectral fractional solve.
double extension_constant(double s);

/// Galerkin Q1 solution of the extension problem with Neumann datum c_s f at
/// y = 0 and natural conditions elsewhere. Each y-level has zero discrete mean.
ExtensionField solve_extension(const Coefficient& a, double s, const Field& f,
                               const ExtensionGrid& grid);

/// sqrt( int int |grad P|^2 y^a ), without the diffusion coefficient.
double weighted_h1_seminorm(const ExtensionField& p, const ExtensionGrid& grid);

/// int int <B grad P, grad P> y^a with B = diag(a(x), 1).
double extension_energy(const ExtensionField& p, const ExtensionGrid& grid, const Coefficient& a);

/// c_s int f P(., 0) dx.
double extension_boundary_work(const ExtensionField& p, const ExtensionGrid& grid, double s,
                               const Field& f);

/// Largest relative deviation of a per-level M-mean from zero.
double max_level_mean(const ExtensionField& p, const ExtensionGrid& grid);

/// Long-format CSV `x,y,P`.
void write_extension_csv(std::ostream& out, const ExtensionField& p, const ExtensionGrid& grid);

}  // namespace fracbayes
