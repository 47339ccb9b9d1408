#include "fracbayes/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <lapacke.h>

#include "fracbayes/error.hpp"

namespace fracbayes {

namespace {

void require_order(double s) {
  detail::require(std::isfinite(s) && s >= 0.0 && s <= 1.0,
                  "fractional order must lie in [0, 1], got " + std::to_string(s));
}

}  // namespace

Field Field::zero_mean(Eigen::VectorXd values, const SparseMatrix& mass) {
  detail::require(values.size() == mass.rows(), "field size does not match the mass matrix");
  const double mean = mean_value(mass, values);
  values.array() -= mean;
  return Field(std::move(values));
}

Field Field::checked(Eigen::VectorXd values, const SparseMatrix& mass, double tol) {
  detail::require(values.size() == mass.rows(), "field size does not match the mass matrix");
  const double integral = (mass * values).sum();
  const double scale = 1.0 + l2_norm(mass, values);
  detail::require(std::abs(integral) <= tol * scale, "field does not have zero mean");
  return Field(std::move(values));
}

Eigen::VectorXd interpolate(const Mesh1D& mesh, const std::function<double(double)>& fn) {
  Eigen::VectorXd v(mesh.n_nodes());
  for (int i = 0; i < mesh.n_nodes(); ++i) v[i] = fn(mesh.node(i));
  return v;
}

double l2_norm(const SparseMatrix& mass, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(mass * v)));
}

double mean_value(const SparseMatrix& mass, const Eigen::VectorXd& v) {
  const Eigen::VectorXd mass_ones = mass * Eigen::VectorXd::Ones(mass.rows());
  return mass_ones.dot(v) / mass_ones.sum();
}

EigenSystem::EigenSystem(Eigen::VectorXd eigenvalues, Eigen::MatrixXd eigenvectors,
                         SparseMatrix mass)
    : eigenvalues_(std::move(eigenvalues)),
      eigenvectors_(std::move(eigenvectors)),
      mass_(std::move(mass)) {
  detail::require(eigenvalues_.size() == eigenvectors_.cols(),
                  "eigenvalue count does not match eigenvector count");
  detail::require(eigenvectors_.rows() == mass_.rows(), "eigenvectors do not match the mass matrix");
  for (Eigen::Index k = 0; k < eigenvalues_.size(); ++k) {
    detail::require(eigenvalues_[k] > 0.0, "eigenvalues must be positive");
    if (k > 0) detail::require(eigenvalues_[k] >= eigenvalues_[k - 1], "eigenvalues must ascend");
  }
  mass_eigenvectors_ = mass_ * eigenvectors_;
}

Eigen::VectorXd EigenSystem::modal_coefficients(const Eigen::VectorXd& v) const {
  detail::require(v.size() == eigenvectors_.rows(), "vector size does not match the eigensystem");
  return mass_eigenvectors_.transpose() * v;
}

Field EigenSystem::synthesize(const Eigen::VectorXd& coefficients) const {
  detail::require(coefficients.size() == eigenvalues_.size(), "wrong number of modal coefficients");
  return Field::trusted(eigenvectors_ * coefficients);
}

Field EigenSystem::project(const Eigen::VectorXd& v) const {
  return synthesize(modal_coefficients(v));
}

double EigenSystem::orthonormality_residual() const {
  Eigen::MatrixXd gram = eigenvectors_.transpose() * mass_eigenvectors_;
  gram -= Eigen::MatrixXd::Identity(gram.rows(), gram.cols());
  return gram.cwiseAbs().maxCoeff();
}

int default_mode_count(int n_nodes) { return std::min(256, n_nodes - 1); }

EigenSystem eigendecompose(const AssembledOperator& op, int n_modes) {
  const int n = op.n_nodes();
  detail::require(n_modes >= 1 && n_modes <= n - 1,
                  "mode count must lie in [1, n_nodes - 1], got " + std::to_string(n_modes));

  // Upper band storage (ldab = 2): row 0 holds the superdiagonal, row 1 the diagonal.
  std::vector<double> ab(2 * static_cast<std::size_t>(n), 0.0);
  std::vector<double> bb(2 * static_cast<std::size_t>(n), 0.0);
  for (int j = 0; j < n; ++j) {
    ab[2 * j + 1] = op.stiffness.coeff(j, j);
    bb[2 * j + 1] = op.mass.coeff(j, j);
    if (j > 0) {
      ab[2 * j] = op.stiffness.coeff(j - 1, j);
      bb[2 * j] = op.mass.coeff(j - 1, j);
    }
  }

  // The smallest generalized eigenvalue is the constant mode; request indices 2..K+1.
  const lapack_int il = 2;
  const lapack_int iu = n_modes + 1;
  std::vector<double> q(static_cast<std::size_t>(n) * n);
  std::vector<double> w(n);
  std::vector<double> z(static_cast<std::size_t>(n) * (n_modes + 1));
  std::vector<lapack_int> ifail(n);
  lapack_int found = 0;
  const double abstol = 2.0 * LAPACKE_dlamch('S');
  const lapack_int info = LAPACKE_dsbgvx(LAPACK_COL_MAJOR, 'V', 'I', 'U', n, 1, 1, ab.data(), 2,
                                         bb.data(), 2, q.data(), n, 0.0, 0.0, il, iu, abstol,
                                         &found, w.data(), z.data(), n, ifail.data());
  if (info != 0 || found != n_modes) {
    throw NumericalError("banded generalized eigensolver failed (info = " + std::to_string(info) +
                         ", found " + std::to_string(found) + " of " + std::to_string(n_modes) +
                         " modes)");
  }

  Eigen::Map<Eigen::MatrixXd> raw(z.data(), n, n_modes);
  Eigen::MatrixXd vectors = raw;
  Eigen::VectorXd values = Eigen::Map<Eigen::VectorXd>(w.data(), n_modes);

  // Deflate the constant vector, then M-orthonormalize (modified Gram-Schmidt).
  const Eigen::VectorXd mass_ones = op.mass * Eigen::VectorXd::Ones(n);
  const double total_mass = mass_ones.sum();
  for (int k = 0; k < n_modes; ++k) {
    auto col = vectors.col(k);
    col.array() -= mass_ones.dot(col) / total_mass;
    for (int j = 0; j < k; ++j) {
      const auto prev = vectors.col(j);
      col -= (op.mass * prev).dot(col) * prev;
    }
    const double norm = l2_norm(op.mass, col);
    if (!(norm > 0.0)) throw NumericalError("eigenvector collapsed during deflation");
    col /= norm;
    // Deterministic sign: the first entry of non-negligible size is positive.
    const double scale = col.cwiseAbs().maxCoeff();
    for (int i = 0; i < n; ++i) {
      if (std::abs(col[i]) > 1e-3 * scale) {
        if (col[i] < 0.0) col = -col;
        break;
      }
    }
  }

  const Eigen::MatrixXd residual = op.stiffness * vectors - op.mass * vectors * values.asDiagonal();
  double worst = 0.0;
  for (int k = 0; k < n_modes; ++k) {
    worst = std::max(worst, residual.col(k).norm() / (values[k] * (op.mass * vectors.col(k)).norm()));
  }
  if (!(values[0] > 0.0) || !(worst < 1e-6)) {
    throw NumericalError("eigensolver did not converge: relative residual " + std::to_string(worst));
  }
  return EigenSystem(std::move(values), std::move(vectors), op.mass);
}

namespace {

Field scale_modes(const EigenSystem& eig, const Field& v, double exponent) {
  Eigen::VectorXd c = eig.modal_coefficients(v.values());
  c.array() *= eig.eigenvalues().array().pow(exponent);
  return eig.synthesize(c);
}

}  // namespace

Field fractional_solve(const EigenSystem& eig, const Field& f, double s) {
  require_order(s);
  return scale_modes(eig, f, -s);
}

Field fractional_apply(const EigenSystem& eig, const Field& p, double s) {
  require_order(s);
  return scale_modes(eig, p, s);
}

double hs_seminorm(const EigenSystem& eig, const Field& p, double s) {
  const Eigen::VectorXd c = eig.modal_coefficients(p.values());
  return std::sqrt((eig.eigenvalues().array().pow(s) * c.array().square()).sum());
}

void write_eigen_csv(std::ostream& out, const EigenSystem& eig, const Mesh1D& mesh) {
  detail::require(mesh.n_nodes() == eig.n_nodes(), "mesh does not match the eigensystem");
  const auto old_precision = out.precision(17);
  out << "x";
  for (int k = 0; k < eig.size(); ++k) out << ",mode_" << (k + 1);
  out << "\nlambda";
  for (int k = 0; k < eig.size(); ++k) out << ',' << eig.eigenvalue(k);
  out << '\n';
  for (int i = 0; i < eig.n_nodes(); ++i) {
    out << mesh.node(i);
    for (int k = 0; k < eig.size(); ++k) out << ',' << eig.eigenvectors()(i, k);
    out << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fracbayes
