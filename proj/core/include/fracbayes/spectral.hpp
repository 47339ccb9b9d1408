#pragma once

#include <functional>
#include <iosfwd>

#include <Eigen/Dense>

#include "fracbayes/mesh.hpp"

namespace fracbayes {

/// Nodal function with vanishing discrete mean (1^T M v = 0).
class Field {
 public:
  /// Removes the M-weighted mean from `values`.
  static Field zero_mean(Eigen::VectorXd values, const SparseMatrix& mass);
  /// Accepts `values` only if |1^T M v| <= tol * (1 + ||v||_M); otherwise throws.
  static Field checked(Eigen::VectorXd values, const SparseMatrix& mass, double tol = 1e-10);
  /// Wraps values already known to be zero mean (e.g. spans of deflated modes).
  static Field trusted(Eigen::VectorXd values) { return Field(std::move(values)); }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::Index size() const { return values_.size(); }
  double operator[](Eigen::Index i) const { return values_[i]; }

  friend Field operator+(const Field& a, const Field& b) { return Field(a.values_ + b.values_); }
  friend Field operator-(const Field& a, const Field& b) { return Field(a.values_ - b.values_); }
  friend Field operator*(double c, const Field& a) { return Field(c * a.values_); }

 private:
  explicit Field(Eigen::VectorXd values) : values_(std::move(values)) {}
  Eigen::VectorXd values_;
};

/// Nodal interpolant of `fn` on the mesh.
Eigen::VectorXd interpolate(const Mesh1D& mesh, const std::function<double(double)>& fn);

/// sqrt(v^T M v).
double l2_norm(const SparseMatrix& mass, const Eigen::VectorXd& v);
/// (1^T M v) / (1^T M 1).
double mean_value(const SparseMatrix& mass, const Eigen::VectorXd& v);

/// First K nonzero generalized eigenpairs of K psi = lambda M psi, ascending,
/// M-orthonormal and M-orthogonal to constants.
class EigenSystem {
 public:
  EigenSystem(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors, SparseMatrix mass);

  int size() const { return static_cast<int>(eigenvalues_.size()); }
  int n_nodes() const { return static_cast<int>(eigenvectors_.rows()); }
  double eigenvalue(int k) const { return eigenvalues_[k]; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  Eigen::VectorXd eigenvector(int k) const { return eigenvectors_.col(k); }
  const SparseMatrix& mass() const { return mass_; }

  /// <v, psi_k>_M for every retained mode.
  Eigen::VectorXd modal_coefficients(const Eigen::VectorXd& v) const;
  /// sum_k c_k psi_k.
  Field synthesize(const Eigen::VectorXd& coefficients) const;
  /// Projection onto the retained-mode subspace.
  Field project(const Eigen::VectorXd& v) const;

  /// max_{i,j} |psi_i^T M psi_j - delta_ij|.
  double orthonormality_residual() const;

 private:
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXd eigenvectors_;  // n_nodes x K
  SparseMatrix mass_;
  Eigen::MatrixXd mass_eigenvectors_;  // M * eigenvectors_
};

/// min(256, n_nodes - 1).
int default_mode_count(int n_nodes);

EigenSystem eigendecompose(const AssembledOperator& op, int n_modes);

/// sum_k lambda_k^{-s} <f, psi_k>_M psi_k. s in [0, 1].
Field fractional_solve(const EigenSystem& eig, const Field& f, double s);
/// sum_k lambda_k^{s} <p, psi_k>_M psi_k. s in [0, 1].
Field fractional_apply(const EigenSystem& eig, const Field& p, double s);
/// sqrt(sum_k lambda_k^s <p, psi_k>_M^2).
double hs_seminorm(const EigenSystem& eig, const Field& p, double s);

/// CSV with header `x,mode_1,...,mode_K`; the first data row holds the
/// eigenvalues (x column reads `lambda`), then one row per node.
void write_eigen_csv(std::ostream& out, const EigenSystem& eig, const Mesh1D& mesh);

}  // namespace fracbayes
