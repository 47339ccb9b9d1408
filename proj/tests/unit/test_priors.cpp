#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "fracbayes/priors.hpp"

namespace fracbayes {
namespace {

constexpr double kPi = std::numbers::pi;

TEST(OrderPrior, RejectsDegenerateSupport) {
  EXPECT_THROW(OrderPrior(0.5, 0.5), std::invalid_argument);
  EXPECT_THROW(OrderPrior(0.6, 0.5), std::invalid_argument);
  EXPECT_THROW(OrderPrior(-0.1, 0.5), std::invalid_argument);
  EXPECT_THROW(OrderPrior(0.1, 1.2), std::invalid_argument);
  EXPECT_NO_THROW(OrderPrior(0.0, 1.0));
}

TEST(CoefficientPrior, RejectsBadHyperparameters) {
  EXPECT_THROW(CoefficientPrior(4, 0.5, 1.0), std::invalid_argument);
  EXPECT_THROW(CoefficientPrior(-1, 2.0, 1.0), std::invalid_argument);
  EXPECT_THROW(CoefficientPrior(4, 2.0, -1.0), std::invalid_argument);
}

TEST(SamplePrior, ReproduciblePerSeed) {
  const PriorConfig prior{OrderPrior(0.05, 0.95), CoefficientPrior(16, 2.0, 0.5)};
  const ParamPoint a = sample_prior(prior, 1234);
  const ParamPoint b = sample_prior(prior, 1234);
  EXPECT_EQ(a.s, b.s);
  EXPECT_EQ(a.xi, b.xi);
  EXPECT_EQ(a.xi.size(), 16u);
  EXPECT_TRUE(prior.order.contains(a.s));
}

TEST(SamplePrior, MonteCarloMoments) {
  const PriorConfig prior{OrderPrior(0.2, 0.9), CoefficientPrior(3, 2.0, 0.5)};
  std::mt19937_64 rng(2024);
  const int n = 100000;
  double s_sum = 0.0, xi_sum = 0.0, xi_sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const ParamPoint u = sample_prior(prior, rng);
    s_sum += u.s;
    xi_sum += u.xi[0];
    xi_sq += u.xi[0] * u.xi[0];
  }
  const double s_mean = s_sum / n;
  const double s_se = (0.9 - 0.2) / std::sqrt(12.0) / std::sqrt(static_cast<double>(n));
  EXPECT_NEAR(s_mean, 0.55, 3 * s_se);
  const double xi_mean = xi_sum / n;
  EXPECT_NEAR(xi_sq / n - xi_mean * xi_mean, 1.0, 0.05);
}

TEST(RealizeCoefficient, ZeroAndConstantFields) {
  const Mesh1D mesh(-kPi, kPi, 64);
  const CoefficientPrior prior(5, 2.0, 0.5);
  const Coefficient one = realize_coefficient(prior, std::vector<double>(5, 0.0), mesh);
  for (double v : one.values()) EXPECT_EQ(v, 1.0);
  const Coefficient shifted = coefficient_from_log_field(mesh, [](double) { return 0.8; });
  for (double v : shifted.values()) EXPECT_DOUBLE_EQ(v, std::exp(-0.8));
  EXPECT_THROW(realize_coefficient(prior, std::vector<double>(4, 0.0), mesh), std::invalid_argument);
}

TEST(RealizeCoefficient, EllipticityControlledBySupNorm) {
  const Mesh1D mesh(-kPi, kPi, 128);
  const PriorConfig prior{OrderPrior(0.0, 1.0), CoefficientPrior(16, 2.0, 0.5)};
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const ParamPoint u = sample_prior(prior, rng);
    const Coefficient a = realize_coefficient(prior.coefficient, u.xi, mesh);
    const double bound = std::exp(log_field_sup(prior.coefficient, u.xi, mesh));
    EXPECT_LE(1.0 / a.lower(), bound * (1 + 1e-14));
    EXPECT_LE(a.upper(), bound * (1 + 1e-14));
    EXPECT_GT(a.lower(), 0.0);
  }
}

TEST(RealizeCoefficient, InverseEllipticityMomentStableInModeCount) {
  const Mesh1D mesh(-kPi, kPi, 128);
  auto moment = [&](int n_kl) {
    const PriorConfig prior{OrderPrior(0.0, 1.0), CoefficientPrior(n_kl, 2.0, 0.5)};
    std::mt19937_64 rng(77);
    double sum = 0.0;
    const int draws = 10000;
    for (int i = 0; i < draws; ++i) {
      const ParamPoint u = sample_prior(prior, rng);
      const double inv = 1.0 / realize_coefficient(prior.coefficient, u.xi, mesh).lower();
      sum += inv * inv;
    }
    return sum / draws;
  };
  const double m16 = moment(16);
  const double m32 = moment(32);
  EXPECT_TRUE(std::isfinite(m16));
  EXPECT_TRUE(std::isfinite(m32));
  EXPECT_NEAR(m32 / m16, 1.0, 0.1);
}

TEST(LogPriorDensity, ClosedFormAndSupport) {
  const PriorConfig prior{OrderPrior(0.1, 0.6), CoefficientPrior(4, 2.0, 0.5)};
  ParamPoint inside{0.3, std::vector<double>(4, 0.0)};
  EXPECT_NEAR(log_prior_density(prior, inside), -2.0 * std::log(2 * kPi) + std::log(1.0 / 0.5), 1e-14);
  ParamPoint outside{0.7, std::vector<double>(4, 0.0)};
  EXPECT_EQ(log_prior_density(prior, outside), -std::numeric_limits<double>::infinity());

  ParamPoint other{0.45, {0.3, -1.2, 0.5, 2.0}};
  const double ratio = std::exp(log_prior_density(prior, other) - log_prior_density(prior, inside));
  const double direct = std::exp(-0.5 * (0.09 + 1.44 + 0.25 + 4.0));
  EXPECT_NEAR(ratio, direct, 1e-12 * direct);
}

}  // namespace
}  // namespace fracbayes
