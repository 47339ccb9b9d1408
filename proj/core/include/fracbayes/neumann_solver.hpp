#pragma once

#include <memory>

#include <Eigen/Dense>

#include "fracbayes/mesh.hpp"

namespace fracbayes {

/// Direct solver for the integer-order Neumann problem K p = b subject to
/// the discrete zero-mean constraint 1^T M p = 0. Factorizes the bordered
/// saddle-point system once; independent of any eigendecomposition.
class NeumannSolver {
 public:
  explicit NeumannSolver(const AssembledOperator& op);
  ~NeumannSolver();
  NeumannSolver(NeumannSolver&&) noexcept;
  NeumannSolver& operator=(NeumannSolver&&) noexcept;

  /// Solves K p = load, mean(p) = 0. The load must be compatible (1^T load = 0);
  /// any incompatible part is absorbed by the Lagrange multiplier.
  Eigen::VectorXd solve_load(const Eigen::VectorXd& load) const;

  /// Discrete L_A^{-1}: solves K p = M f.
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& f) const;

  const SparseMatrix& mass() const { return mass_; }

 private:
  struct Factorization;
  SparseMatrix mass_;
  std::unique_ptr<Factorization> factor_;
};

}  // namespace fracbayes
