#include "fracbayes/priors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "fracbayes/error.hpp"

namespace fracbayes {

OrderPrior::OrderPrior(double s_lo, double s_hi) : lo_(s_lo), hi_(s_hi) {
  detail::require(std::isfinite(s_lo) && std::isfinite(s_hi), "order prior bounds must be finite");
  detail::require(s_lo >= 0.0 && s_hi <= 1.0, "order prior support must lie in [0, 1]");
  detail::require(s_lo < s_hi, "order prior support has zero width");
}

double OrderPrior::log_density(double s) const {
  return contains(s) ? -std::log(hi_ - lo_) : -std::numeric_limits<double>::infinity();
}

CoefficientPrior::CoefficientPrior(int n_kl, double tau, double sigma_v)
    : n_kl_(n_kl), tau_(tau), sigma_v_(sigma_v) {
  detail::require(n_kl >= 0, "n_kl must be non-negative");
  detail::require(tau > 0.5, "KL decay exponent tau must exceed 1/2");
  detail::require(std::isfinite(sigma_v) && sigma_v >= 0.0, "sigma_v must be non-negative");
}

double CoefficientPrior::log_field(const std::vector<double>& xi, const Mesh1D& mesh,
                                   double x) const {
  detail::require(static_cast<int>(xi.size()) == n_kl_,
                  "expected " + std::to_string(n_kl_) + " KL coordinates, got " +
                      std::to_string(xi.size()));
  const double phase = std::numbers::pi * (x - mesh.x_left()) / mesh.length();
  double v = 0.0;
  for (int k = 1; k <= n_kl_; ++k) {
    v += std::pow(static_cast<double>(k), -tau_) * xi[k - 1] * std::cos(k * phase);
  }
  return sigma_v_ * v;
}

ParamPoint sample_prior(const PriorConfig& prior, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> uniform(prior.order.lo(), prior.order.hi());
  std::normal_distribution<double> normal(0.0, 1.0);
  ParamPoint u;
  u.s = uniform(rng);
  u.xi.resize(static_cast<std::size_t>(prior.coefficient.n_kl()));
  for (double& x : u.xi) x = normal(rng);
  return u;
}

ParamPoint sample_prior(const PriorConfig& prior, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample_prior(prior, rng);
}

Coefficient coefficient_from_log_field(const Mesh1D& mesh,
                                       const std::function<double(double)>& v) {
  std::vector<double> cells(static_cast<std::size_t>(mesh.n_cells()));
  for (int c = 0; c < mesh.n_cells(); ++c) cells[c] = std::exp(-v(mesh.midpoint(c)));
  return Coefficient(std::move(cells));
}

Coefficient realize_coefficient(const CoefficientPrior& prior, const std::vector<double>& xi,
                                const Mesh1D& mesh) {
  return coefficient_from_log_field(
      mesh, [&](double x) { return prior.log_field(xi, mesh, x); });
}

double log_field_sup(const CoefficientPrior& prior, const std::vector<double>& xi,
                     const Mesh1D& mesh) {
  double sup = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    sup = std::max(sup, std::abs(prior.log_field(xi, mesh, mesh.midpoint(c))));
  }
  return sup;
}

double log_prior_density(const PriorConfig& prior, const ParamPoint& u) {
  const double order_part = prior.order.log_density(u.s);
  if (!std::isfinite(order_part)) return order_part;
  detail::require(static_cast<int>(u.xi.size()) == prior.coefficient.n_kl(),
                  "parameter has the wrong number of KL coordinates");
  double sq = 0.0;
  for (double x : u.xi) sq += x * x;
  const double n = static_cast<double>(u.xi.size());
  return order_part - 0.5 * sq - 0.5 * n * std::log(2.0 * std::numbers::pi);
}

}  // namespace fracbayes
