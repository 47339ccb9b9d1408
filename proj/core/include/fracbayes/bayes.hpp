#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fracbayes/forward.hpp"
#include "fracbayes/priors.hpp"

namespace fracbayes {

/// Posterior on a uniform s-grid, normalized so that its trapezoid integral is one.
class PosteriorDensity1D {
 public:
  /// Normalizes non-negative weights by their trapezoid integral over `grid`.
  static PosteriorDensity1D normalized(std::vector<double> grid, std::vector<double> weights);

  const std::vector<double>& grid() const { return grid_; }
  const std::vector<double>& weights() const { return weights_; }
  /// Trapezoid integral of the unnormalized weights, relative to their maximum.
  double normalization() const { return normalization_; }
  std::size_t size() const { return grid_.size(); }

 private:
  PosteriorDensity1D(std::vector<double> grid, std::vector<double> weights, double z)
      : grid_(std::move(grid)), weights_(std::move(weights)), normalization_(z) {}
  std::vector<double> grid_;
  std::vector<double> weights_;
  double normalization_;
};

/// Trapezoid integral of values over grid.
double trapezoid(const std::vector<double>& grid, const std::vector<double>& values);

/// Phi = 1/2 sum_j (y_j - g_j)^2 / gamma^2.
double misfit_potential(const Eigen::VectorXd& y, const Eigen::VectorXd& g, double gamma);

/// Parameter-to-observation map u = (s, xi) -> G(u) with the coefficient
/// a = exp(-v(xi)). Caches the eigensystem of the last coefficient so that
/// repeated evaluations at the same xi only redo the K-term modal sum.
/// Not safe for concurrent use; give each chain its own model.
class JointForwardModel {
 public:
  JointForwardModel(Mesh1D mesh, Field source, ObservationSetup setup, CoefficientPrior prior,
                    std::optional<int> n_modes = std::nullopt);

  Eigen::VectorXd evaluate(const ParamPoint& u);
  const Mesh1D& mesh() const { return mesh_; }
  const ObservationSetup& setup() const { return setup_; }
  const CoefficientPrior& coefficient_prior() const { return prior_; }
  int eigendecompositions() const { return eigendecompositions_; }

 private:
  Mesh1D mesh_;
  Field source_;
  ObservationSetup setup_;
  CoefficientPrior prior_;
  std::optional<int> n_modes_;
  std::optional<std::vector<double>> cached_xi_;
  std::optional<SpectralForwardMap> cached_map_;
  int eigendecompositions_ = 0;
};

/// Phi(u; y). Data with no observations gives Phi == 0 without a forward solve.
double potential(const ParamPoint& u, const DataVector& data, JointForwardModel& model);

/// Grid posterior from an arbitrary potential s -> Phi(s): weights proportional
/// to prior(s) exp(-Phi(s)), computed in the log domain with max subtraction.
PosteriorDensity1D posterior_grid_1d(const OrderPrior& prior, int n_grid,
                                     const std::function<double(double)>& potential_of_s);

/// s-only posterior at a fixed coefficient.
PosteriorDensity1D posterior_grid_1d(const DataVector& data, const OrderPrior& prior,
                                     const SpectralForwardMap& forward, int n_grid = 401);

enum class OrderProposal { reflected_walk, independent };

struct McmcOptions {
  int n_steps = 10000;
  double beta = 0.2;
  double s_step = 0.05;
  OrderProposal order_proposal = OrderProposal::reflected_walk;
};

struct Chain {
  std::vector<ParamPoint> samples;  // state after each step
  std::vector<double> potentials;
  std::vector<char> accepted;
  double acceptance_rate = 0.0;
  int longest_rejection_run = 0;
  double beta = 0.0;
  double s_step = 0.0;
};

/// Metropolis rule: accept iff log(uniform) < log_ratio.
bool metropolis_accept(double log_ratio, double uniform);

/// Folds x back into [lo, hi] by mirror reflection at both ends.
double reflect_into(double x, double lo, double hi);

/// pCN on xi (xi' = sqrt(1 - beta^2) xi + beta zeta) with a symmetric proposal
/// on s; acceptance min{1, exp(Phi(u) - Phi(u'))}. Reproducible per seed.
Chain pcn_mcmc(const DataVector& data, JointForwardModel& model, const PriorConfig& prior,
               const McmcOptions& options, std::uint64_t seed);

struct PosteriorSummary {
  double mean;
  double std;
  double mode;
  double ci_lo;  // 5% quantile
  double ci_hi;  // 95% quantile
};

PosteriorSummary posterior_summary(const PosteriorDensity1D& density);
/// Summary of the s-marginal after discarding `burn_in` steps. The mode is the
/// retained sample with the smallest potential minus log prior.
PosteriorSummary posterior_summary(const Chain& chain, const PriorConfig& prior, int burn_in = 0);

void write_density_csv(std::ostream& out, const PosteriorDensity1D& density);
void write_chain_csv(std::ostream& out, const Chain& chain);

}  // namespace fracbayes
