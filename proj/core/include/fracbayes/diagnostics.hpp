#pragma once

#include <functional>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fracbayes/bayes.hpp"
#include "fracbayes/mesh.hpp"
#include "fracbayes/spectral.hpp"

namespace fracbayes {

/// Hellinger distance sqrt( 1/2 int (sqrt p - sqrt q)^2 ) by trapezoid quadrature.
double hellinger_1d(const PosteriorDensity1D& p, const PosteriorDensity1D& q);

struct HellingerPoint {
  double data_shift;  // |y1 - y2|
  double distance;    // D_Hell
  double ratio;       // distance / data_shift (0 when the shift is 0)
};

struct HellingerReport {
  std::vector<HellingerPoint> points;
  double slope;  // least-squares slope of log D against log |dy| over positive shifts
  double max_ratio;
  double min_ratio;
};

/// Maps a data vector to its posterior on a fixed s-grid.
using PosteriorOfData = std::function<PosteriorDensity1D(const DataVector&)>;

/// For each epsilon compares the posteriors of y and y + epsilon e (e normalized).
/// When `radius` is given both data vectors must lie in the ball of that radius.
HellingerReport wellposedness_sweep(const DataVector& data, const std::vector<double>& epsilons,
                                    const Eigen::VectorXd& direction,
                                    const PosteriorOfData& posterior_of,
                                    std::optional<double> radius = std::nullopt);

/// Spectral norm, on zero-mean fields with the M inner product, of the
/// difference of the discrete solution operators L_A^{-1} - L_{A'}^{-1}.
/// Power iteration with fixed start; throws NumericalError on stagnation.
double op_norm_diff(const Mesh1D& mesh, const Coefficient& a, const Coefficient& a_prime,
                    double rel_tol = 1e-10, int max_iterations = 20000);

struct PerturbationReport {
  bool applicable = true;
  double coefficient_gap = 0.0;  // ||a - a'||_inf
  double op_norm = 0.0;
  double op_norm_ratio = 0.0;  // op_norm lambda_A lambda_A' / ||a - a'||_inf
  std::vector<double> reciprocal_gaps;   // |1/lambda_i - 1/lambda_i'|
  std::vector<double> vector_distances;  // ||psi_i' - psi_match||_M
  std::vector<double> reciprocal_ratios;
  std::vector<double> distance_ratios;
  std::vector<int> matched_indices;
  double min_reciprocal_gap = 0.0;  // smallest separation among 1/lambda_1..N of a
};

/// Compares the first N eigenpairs of two coefficients. Each psi_i' is matched
/// greedily to the sign-aligned eigenvector of a with the largest |<., .>_M|.
/// Reports `applicable = false` when the first N reciprocal eigenvalues of a are
/// not separated by more than 2 op_norm_diff.
PerturbationReport eigen_perturbation_check(const Mesh1D& mesh, const Coefficient& a,
                                            const Coefficient& a_prime, int n_pairs);

/// hs_seminorm(p_{s,a} - p_{s,a'}, s) / ||a - a'||_inf, measured in a's eigenbasis.
double forward_lipschitz_probe(double s, const Mesh1D& mesh, const Coefficient& a,
                               const Coefficient& a_prime, const Field& f,
                               std::optional<int> n_modes = std::nullopt);

/// max over node pairs of |v_i - v_j| / |x_i - x_j|^alpha.
double holder_seminorm(const Mesh1D& mesh, const Eigen::VectorXd& v, double alpha);

struct HolderCheck {
  bool pass;
  double lhs;    // ||p - q||_inf
  double rhs;    // C max([p],[q])^{1/(2 alpha + 1)} ||p - q||_{L2}^{2 alpha/(2 alpha + 1)}
  double slack;  // rhs - lhs
};

/// One-dimensional Holder/L2 interpolation inequality for the pair (p, q).
HolderCheck holder_interpolation_check(const Mesh1D& mesh, const Eigen::VectorXd& p,
                                       const Eigen::VectorXd& q, double alpha,
                                       double constant = 4.0);

/// KL coordinates of a coefficient pair, drawn once and realizable on any mesh:
/// a = exp(-v(xi)) and a' = a + size r(eta) / max|r(eta)|, both fields in the prior's KL basis.
struct CoefficientPairDraw {
  std::vector<double> xi;
  std::vector<double> eta;
};

CoefficientPairDraw draw_coefficient_pair(const CoefficientPrior& prior, std::mt19937_64& rng);

/// Throws std::invalid_argument if the perturbation makes a' non-positive.
std::pair<Coefficient, Coefficient> realize_pair(const CoefficientPairDraw& draw,
                                                 const CoefficientPrior& prior, const Mesh1D& mesh,
                                                 double size);

struct ConcentrationCheck {
  bool pass;
  int inversions;        // adjacent pairs where the std grows
  double worst_increase;  // largest relative growth among them
};

/// Posterior std table indexed [row][column]; rows should sharpen left to right
/// and columns top to bottom. Passes with at most `max_inversions` increases,
/// each no larger than `tolerance` relative.
ConcentrationCheck check_concentration(const std::vector<std::vector<double>>& std_table,
                                       int max_inversions = 1, double tolerance = 0.1);

}  // namespace fracbayes
