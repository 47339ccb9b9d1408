#include "fracbayes/neumann_solver.hpp"

#include <vector>

#include <Eigen/SparseLU>

#include "fracbayes/error.hpp"

namespace fracbayes {

struct NeumannSolver::Factorization {
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  Eigen::Index n = 0;
};

NeumannSolver::NeumannSolver(const AssembledOperator& op)
    : mass_(op.mass), factor_(std::make_unique<Factorization>()) {
  const Eigen::Index n = op.n_nodes();
  const Eigen::VectorXd mass_ones = op.mass * Eigen::VectorXd::Ones(n);

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(op.stiffness.nonZeros() + 2 * n));
  for (Eigen::Index k = 0; k < op.stiffness.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(op.stiffness, k); it; ++it) {
      triplets.emplace_back(it.row(), it.col(), it.value());
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    triplets.emplace_back(i, n, mass_ones[i]);
    triplets.emplace_back(n, i, mass_ones[i]);
  }
  SparseMatrix bordered(n + 1, n + 1);
  bordered.setFromTriplets(triplets.begin(), triplets.end());
  bordered.makeCompressed();

  factor_->n = n;
  factor_->lu.compute(bordered);
  if (factor_->lu.info() != Eigen::Success) {
    throw NumericalError("Neumann saddle-point factorization failed: " +
                         factor_->lu.lastErrorMessage());
  }
}

NeumannSolver::~NeumannSolver() = default;
NeumannSolver::NeumannSolver(NeumannSolver&&) noexcept = default;
NeumannSolver& NeumannSolver::operator=(NeumannSolver&&) noexcept = default;

Eigen::VectorXd NeumannSolver::solve_load(const Eigen::VectorXd& load) const {
  const Eigen::Index n = factor_->n;
  detail::require(load.size() == n, "load vector size does not match the mesh");
  Eigen::VectorXd rhs(n + 1);
  rhs.head(n) = load;
  rhs[n] = 0.0;
  Eigen::VectorXd sol = factor_->lu.solve(rhs);
  if (factor_->lu.info() != Eigen::Success) {
    throw NumericalError("Neumann saddle-point solve failed");
  }
  return sol.head(n);
}

Eigen::VectorXd NeumannSolver::apply_inverse(const Eigen::VectorXd& f) const {
  return solve_load(mass_ * f);
}

}  // namespace fracbayes
