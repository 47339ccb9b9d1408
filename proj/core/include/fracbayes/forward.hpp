#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fracbayes/mesh.hpp"
#include "fracbayes/spectral.hpp"

namespace fracbayes {

/// Pointwise observation locations and i.i.d. Gaussian noise level gamma.
struct ObservationSetup {
  std::vector<double> points;
  double noise_std = 1.0;

  int size() const { return static_cast<int>(points.size()); }
};

/// Uniform observation grid: m = 1 observes the right endpoint; m >= 2 puts
/// x_j = x_left + j (x_right - x_left)/(m - 1), j = 0..m-1. m = 0 is the
/// empty (data-free) setup.
ObservationSetup grid_observation_setup(int m, double noise_std, double x_left, double x_right);

/// Noisy observation y = G(u) + eta together with its setup and seed.
struct DataVector {
  ObservationSetup setup;
  Eigen::VectorXd y;
  std::uint64_t seed = 0;
};

/// Sparse row-per-point P1 interpolation matrix (m x n_nodes).
SparseMatrix pointwise_operator(const Mesh1D& mesh, const std::vector<double>& points);

/// Piecewise-linear interpolation of nodal values at each observation point.
Eigen::VectorXd observe_pointwise(const Mesh1D& mesh, const Eigen::VectorXd& p,
                                  const ObservationSetup& setup);

struct Window {
  double lo;
  double hi;
};

/// Mean of the P1 interpolant of p over each window (exact trapezoid on the
/// window breakpoints).
Eigen::VectorXd observe_average(const Mesh1D& mesh, const Eigen::VectorXd& p,
                                const std::vector<Window>& windows);

enum class SolverKind { spectral, extension };

struct ForwardOptions {
  std::optional<int> n_modes;  // default_mode_count() when unset
  int extension_levels = 128;
  double extension_y_max = 8.0;
  double extension_grading = 3.0;
};

/// G(s, a) = O(F(s, a)) for pointwise observations.
Eigen::VectorXd forward_G(double s, const Coefficient& a, const Mesh1D& mesh, const Field& f,
                          const ObservationSetup& setup, SolverKind solver,
                          const ForwardOptions& options = {});

/// Forward map at a fixed coefficient with the eigensystem, modal source
/// coefficients and observed eigenvectors cached; evaluate(s) is a K-term sum.
class SpectralForwardMap {
 public:
  SpectralForwardMap(const AssembledOperator& op, const Field& f, const ObservationSetup& setup,
                     std::optional<int> n_modes = std::nullopt);
  SpectralForwardMap(EigenSystem eig, const Mesh1D& mesh, const Field& f,
                     const ObservationSetup& setup);

  Eigen::VectorXd evaluate(double s) const;
  Field solution(double s) const;
  const EigenSystem& eigensystem() const { return eig_; }
  int n_observations() const { return static_cast<int>(observed_modes_.rows()); }

 private:
  EigenSystem eig_;
  Eigen::VectorXd source_modes_;
  Eigen::MatrixXd observed_modes_;  // m x K
};

// ---- analytic toy problem on [-pi, pi] with a == 1 ----

/// cos(b x) - sin(b pi)/(b pi); zero mean on [-pi, pi]. b must not be an integer.
double analytic_source(double b, double x);

/// Cosine-series coefficient f_k = (-1)^k 2 b sin(b pi) / (pi (b^2 - k^2)).
double analytic_fourier_coefficient(double b, int k);

struct SeriesValue {
  double value;
  double tail_bound;  // bound on the omitted terms k > K_terms
};

/// sum_{k=1}^{K} f_k k^{-2s} cos(k x), the exact solution of (-Laplace)^s p = f.
SeriesValue analytic_solution(double b, double s, double x, int k_terms);

/// Zero-mean nodal source field for the toy problem on the given mesh.
Field analytic_source_field(double b, const Mesh1D& mesh);

/// y = G(s*, a*) + gamma xi, xi ~ N(0, I) from a seeded mt19937_64.
DataVector synth_data(double s_star, const Coefficient& a_star, double b, const Mesh1D& mesh,
                      const ObservationSetup& setup, std::uint64_t seed,
                      const ForwardOptions& options = {});

/// Same as synth_data but from precomputed noiseless observations.
DataVector add_noise(const Eigen::VectorXd& noiseless, const ObservationSetup& setup,
                     std::uint64_t seed);

}  // namespace fracbayes
