#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "fracbayes/mesh.hpp"

namespace fracbayes {

/// Uniform prior on the order s over [s_lo, s_hi] within [0, 1].
class OrderPrior {
 public:
  OrderPrior(double s_lo, double s_hi);

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool contains(double s) const { return s >= lo_ && s <= hi_; }
  double density(double s) const { return contains(s) ? 1.0 / (hi_ - lo_) : 0.0; }
  double log_density(double s) const;

 private:
  double lo_;
  double hi_;
};

/// Log-Gaussian coefficient prior a = exp(-v),
///   v(x) = sigma_v sum_{k=1}^{n_kl} k^{-tau} xi_k cos(k pi (x - x_left) / L).
/// n_kl = 0 pins the coefficient to a == 1.
class CoefficientPrior {
 public:
  CoefficientPrior(int n_kl = 16, double tau = 2.0, double sigma_v = 0.5);

  int n_kl() const { return n_kl_; }
  double tau() const { return tau_; }
  double sigma_v() const { return sigma_v_; }

  /// v(x) for KL coordinates xi on the given mesh geometry.
  double log_field(const std::vector<double>& xi, const Mesh1D& mesh, double x) const;

 private:
  int n_kl_;
  double tau_;
  double sigma_v_;
};

struct PriorConfig {
  OrderPrior order{0.0, 1.0};
  CoefficientPrior coefficient{};
};

/// Unknown u = (s, A) parameterized by the order and the KL coordinates of log A.
struct ParamPoint {
  double s = 0.0;
  std::vector<double> xi;
};

ParamPoint sample_prior(const PriorConfig& prior, std::mt19937_64& rng);
ParamPoint sample_prior(const PriorConfig& prior, std::uint64_t seed);

/// Cell values exp(-v(cell midpoint)).
Coefficient realize_coefficient(const CoefficientPrior& prior, const std::vector<double>& xi,
                                const Mesh1D& mesh);

/// Cell values exp(-v(cell midpoint)) for an arbitrary log-field v.
Coefficient coefficient_from_log_field(const Mesh1D& mesh, const std::function<double(double)>& v);

/// max over cell midpoints of |v|.
double log_field_sup(const CoefficientPrior& prior, const std::vector<double>& xi,
                     const Mesh1D& mesh);

/// Uniform log-density of s plus standard-normal log-density of xi;
/// -infinity when s leaves the support.
double log_prior_density(const PriorConfig& prior, const ParamPoint& u);

}  // namespace fracbayes
