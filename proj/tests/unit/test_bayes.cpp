#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "fracbayes/bayes.hpp"
#include "fracbayes/error.hpp"

namespace fracbayes {
namespace {

constexpr double kPi = std::numbers::pi;

// b = 1/2, s* = 0.7, a = 1 on [-pi, pi].
struct ToySetup {
  Mesh1D mesh;
  Field source;
  ObservationSetup setup;
  DataVector data;

  ToySetup(int n, int m, double gamma, std::uint64_t seed)
      : mesh(-kPi, kPi, n),
        source(analytic_source_field(0.5, mesh)),
        setup(grid_observation_setup(m, gamma, -kPi, kPi)),
        data(synth_data(0.7, Coefficient::constant(n, 1.0), 0.5, mesh, setup, seed)) {}
};

TEST(Potential, ClosedFormExamples) {
  const Eigen::VectorXd y = Eigen::Vector3d(1.0, 2.0, 3.0);
  EXPECT_EQ(misfit_potential(y, y, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(misfit_potential(Eigen::VectorXd::Constant(1, 2.5), Eigen::VectorXd::Zero(1), 1.0),
                   3.125);
  const Eigen::VectorXd g = Eigen::Vector3d(0.5, 2.5, 2.0);
  EXPECT_NEAR(misfit_potential(y, g, 0.2), misfit_potential(3.0 * y, 3.0 * g, 0.6), 1e-12);
  EXPECT_THROW(misfit_potential(y, g, 0.0), std::invalid_argument);
}

TEST(Potential, MonotoneInEachResidual) {
  const Eigen::VectorXd g = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd y = Eigen::Vector4d(0.1, -0.3, 0.2, 0.0);
  double previous = misfit_potential(y, g, 0.1);
  for (int step = 0; step < 10; ++step) {
    y[1] -= 0.05;
    const double next = misfit_potential(y, g, 0.1);
    EXPECT_GE(next, previous);
    previous = next;
  }
}

TEST(Potential, EmptyDataSkipsForwardSolve) {
  const Mesh1D mesh(-kPi, kPi, 32);
  JointForwardModel model(mesh, analytic_source_field(0.5, mesh), ObservationSetup{{}, 0.1},
                          CoefficientPrior(3, 2.0, 0.5));
  const DataVector empty{ObservationSetup{{}, 0.1}, Eigen::VectorXd(0), 0};
  EXPECT_EQ(potential({0.4, {0.1, 0.2, 0.3}}, empty, model), 0.0);
  EXPECT_EQ(model.eigendecompositions(), 0);
}

TEST(JointForwardModel, ReusesEigensystemAcrossOrders) {
  const Mesh1D mesh(-kPi, kPi, 64);
  JointForwardModel model(mesh, analytic_source_field(0.5, mesh),
                          grid_observation_setup(5, 0.1, -kPi, kPi), CoefficientPrior(2, 2.0, 0.5));
  model.evaluate({0.3, {0.1, 0.2}});
  model.evaluate({0.8, {0.1, 0.2}});
  EXPECT_EQ(model.eigendecompositions(), 1);
  model.evaluate({0.8, {0.1, 0.25}});
  EXPECT_EQ(model.eigendecompositions(), 2);
}

TEST(PosteriorGrid, FlatLikelihoodReturnsPrior) {
  const OrderPrior prior(0.2, 0.8);
  const PosteriorDensity1D flat = posterior_grid_1d(prior, 101, [](double) { return 3.7; });
  for (std::size_t i = 0; i < flat.size(); ++i) EXPECT_NEAR(flat.weights()[i], 1.0 / 0.6, 1e-12);
  EXPECT_NEAR(trapezoid(flat.grid(), flat.weights()), 1.0, 1e-10);
  EXPECT_THROW(posterior_grid_1d(prior, 50, [](double) { return 0.0; }), std::invalid_argument);
}

TEST(PosteriorGrid, EmptyDataReturnsPrior) {
  const Mesh1D mesh(-kPi, kPi, 64);
  const SpectralForwardMap map(assemble(mesh, Coefficient::constant(64, 1.0)),
                               analytic_source_field(0.5, mesh), ObservationSetup{{}, 0.1});
  const DataVector empty{ObservationSetup{{}, 0.1}, Eigen::VectorXd(0), 0};
  const PosteriorDensity1D d = posterior_grid_1d(empty, OrderPrior(0.0, 1.0), map);
  EXPECT_EQ(d.size(), 401u);
  for (double w : d.weights()) EXPECT_NEAR(w, 1.0, 1e-12);
}

TEST(PosteriorGrid, SurvivesHugePotentialsAndReportsUnderflow) {
  const OrderPrior prior(0.0, 1.0);
  const PosteriorDensity1D sharp =
      posterior_grid_1d(prior, 201, [](double s) { return 1e6 + 5e4 * (s - 0.4) * (s - 0.4); });
  EXPECT_NEAR(trapezoid(sharp.grid(), sharp.weights()), 1.0, 1e-10);
  EXPECT_NEAR(posterior_summary(sharp).mode, 0.4, 1e-12);
  EXPECT_THROW(posterior_grid_1d(prior, 201,
                                 [](double) { return std::numeric_limits<double>::infinity(); }),
               NumericalError);
}

TEST(PosteriorGrid, ToyModeNearTrueOrder) {
  const ToySetup toy(1024, 100, 0.075, 20240601);
  const SpectralForwardMap map(assemble(toy.mesh, Coefficient::constant(1024, 1.0)), toy.source,
                               toy.setup);
  const PosteriorDensity1D d = posterior_grid_1d(toy.data, OrderPrior(0.0, 1.0), map);
  EXPECT_NEAR(trapezoid(d.grid(), d.weights()), 1.0, 1e-10);
  EXPECT_NEAR(posterior_summary(d).mode, 0.7, 0.05);
}

TEST(Metropolis, RuleAndReflection) {
  EXPECT_TRUE(metropolis_accept(0.0, 0.999));
  EXPECT_TRUE(metropolis_accept(std::log(0.5), 0.49));
  EXPECT_FALSE(metropolis_accept(std::log(0.5), 0.51));
  EXPECT_DOUBLE_EQ(reflect_into(1.1, 0.0, 1.0), 0.9);
  EXPECT_DOUBLE_EQ(reflect_into(-0.2, 0.0, 1.0), 0.2);
  EXPECT_NEAR(reflect_into(2.3, 0.0, 1.0), 0.3, 1e-15);
  EXPECT_DOUBLE_EQ(reflect_into(0.4, 0.0, 1.0), 0.4);
}

TEST(Metropolis, TwoStateDetailedBalance) {
  // Target (3/4, 1/4) with a deterministic flip proposal.
  const double phi[2] = {0.0, std::log(3.0)};
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int state = 0;
  long visits = 0;
  const long steps = 1000000;
  for (long i = 0; i < steps; ++i) {
    const int proposal = 1 - state;
    if (metropolis_accept(phi[state] - phi[proposal], unit(rng))) state = proposal;
    visits += state == 0;
  }
  EXPECT_NEAR(static_cast<double>(visits) / steps, 0.75, 0.02 * 0.75);
}

TEST(PcnMcmc, RejectsBadOptionsAndIsReproducible) {
  const Mesh1D mesh(-kPi, kPi, 32);
  const PriorConfig prior{OrderPrior(0.0, 1.0), CoefficientPrior(3, 2.0, 0.5)};
  JointForwardModel model(mesh, analytic_source_field(0.5, mesh),
                          grid_observation_setup(3, 0.2, -kPi, kPi), prior.coefficient);
  const DataVector data = synth_data(0.7, Coefficient::constant(32, 1.0), 0.5, mesh, model.setup(), 1);
  McmcOptions bad;
  bad.beta = 0.0;
  EXPECT_THROW(pcn_mcmc(data, model, prior, bad, 1), std::invalid_argument);
  bad.beta = 1.5;
  EXPECT_THROW(pcn_mcmc(data, model, prior, bad, 1), std::invalid_argument);

  McmcOptions options;
  options.n_steps = 300;
  const Chain a = pcn_mcmc(data, model, prior, options, 42);
  const Chain b = pcn_mcmc(data, model, prior, options, 42);
  ASSERT_EQ(a.samples.size(), 300u);
  EXPECT_EQ(a.potentials.size(), 300u);
  EXPECT_EQ(a.accepted.size(), 300u);
  std::ostringstream ca, cb;
  write_chain_csv(ca, a);
  write_chain_csv(cb, b);
  EXPECT_EQ(ca.str(), cb.str());
  EXPECT_EQ(ca.str().substr(0, ca.str().find('\n')), "step,s,xi_1,xi_2,xi_3,phi,accepted");
  EXPECT_GE(a.acceptance_rate, 0.0);
  EXPECT_LE(a.acceptance_rate, 1.0);
}

TEST(PcnMcmc, RecoversPriorWithoutData) {
  const Mesh1D mesh(-kPi, kPi, 32);
  const PriorConfig prior{OrderPrior(0.0, 1.0), CoefficientPrior(2, 2.0, 0.5)};
  JointForwardModel model(mesh, analytic_source_field(0.5, mesh), ObservationSetup{{}, 0.1},
                          prior.coefficient);
  const DataVector empty{ObservationSetup{{}, 0.1}, Eigen::VectorXd(0), 0};
  McmcOptions options;
  options.n_steps = 100000;
  options.beta = 0.5;
  const Chain chain = pcn_mcmc(empty, model, prior, options, 2024);
  EXPECT_EQ(chain.acceptance_rate, 1.0);
  double sum = 0.0, sum_sq = 0.0, s_sum = 0.0;
  for (const ParamPoint& u : chain.samples) {
    sum += u.xi[0];
    sum_sq += u.xi[0] * u.xi[0];
    s_sum += u.s;
  }
  const double n = static_cast<double>(chain.samples.size());
  EXPECT_NEAR(sum / n, 0.0, 0.05);
  EXPECT_NEAR(sum_sq / n - (sum / n) * (sum / n), 1.0, 0.05);
  EXPECT_NEAR(s_sum / n, 0.5, 0.025);
  EXPECT_EQ(model.eigendecompositions(), 0);
}

TEST(PcnMcmc, UnitBetaIsIndependenceSampler) {
  const Mesh1D mesh(-kPi, kPi, 32);
  const PriorConfig prior{OrderPrior(0.0, 1.0), CoefficientPrior(2, 2.0, 0.5)};
  JointForwardModel model(mesh, analytic_source_field(0.5, mesh),
                          grid_observation_setup(4, 0.3, -kPi, kPi), prior.coefficient);
  const DataVector data = synth_data(0.7, Coefficient::constant(32, 1.0), 0.5, mesh, model.setup(), 8);
  McmcOptions options;
  options.n_steps = 5000;
  options.beta = 1.0;
  options.order_proposal = OrderProposal::independent;
  const Chain chain = pcn_mcmc(data, model, prior, options, 5);

  // E[min(1, exp(Phi(u) - Phi(u')))] with u from the chain and u' fresh prior draws.
  std::mt19937_64 rng(99);
  double expected = 0.0;
  const int burn_in = 500;
  for (std::size_t i = burn_in; i < chain.samples.size(); ++i) {
    const ParamPoint fresh = sample_prior(prior, rng);
    expected += std::min(1.0, std::exp(chain.potentials[i] - potential(fresh, data, model)));
  }
  expected /= static_cast<double>(chain.samples.size() - burn_in);
  EXPECT_NEAR(chain.acceptance_rate, expected, 0.04);
  EXPECT_LT(chain.acceptance_rate, 1.0);
}

TEST(PcnMcmc, AgreesWithQuadratureWhenCoefficientIsFixed) {
  const ToySetup toy(1024, 100, 0.075, 20240601);
  const PriorConfig prior{OrderPrior(0.0, 1.0), CoefficientPrior(0, 2.0, 0.5)};
  JointForwardModel model(toy.mesh, toy.source, toy.setup, prior.coefficient);
  McmcOptions options;
  options.n_steps = 100000;
  const Chain chain = pcn_mcmc(toy.data, model, prior, options, 77);
  EXPECT_EQ(model.eigendecompositions(), 1);

  const SpectralForwardMap map(assemble(toy.mesh, Coefficient::constant(1024, 1.0)), toy.source,
                               toy.setup);
  const PosteriorSummary grid = posterior_summary(posterior_grid_1d(toy.data, prior.order, map));
  const PosteriorSummary mc = posterior_summary(chain, prior, 5000);
  EXPECT_NEAR(mc.mean, grid.mean, 0.02);
  EXPECT_NEAR(mc.std, grid.std, 0.02);
  EXPECT_NEAR(mc.ci_lo, grid.ci_lo, 0.05);
  EXPECT_NEAR(mc.ci_hi, grid.ci_hi, 0.05);
}

TEST(PosteriorSummary, DensityExamples) {
  std::vector<double> grid(101), tent(101), spike(101, 1e-12);
  for (int i = 0; i <= 100; ++i) {
    grid[i] = 0.2 + 0.006 * i;
    tent[i] = 1.0 - std::abs(i - 50) / 50.0;
  }
  const PosteriorSummary sym = posterior_summary(PosteriorDensity1D::normalized(grid, tent));
  EXPECT_NEAR(sym.mean, 0.5, 1e-10);
  EXPECT_NEAR(sym.ci_lo + sym.ci_hi, 1.0, 1e-10);
  spike[37] = 1.0;
  EXPECT_DOUBLE_EQ(posterior_summary(PosteriorDensity1D::normalized(grid, spike)).mode, grid[37]);
  EXPECT_THROW(PosteriorDensity1D::normalized(grid, std::vector<double>(101, 0.0)), NumericalError);
  EXPECT_THROW(PosteriorDensity1D::normalized(grid, std::vector<double>(100, 1.0)),
               std::invalid_argument);
}

TEST(PosteriorSummary, ChainExamples) {
  Chain chain;
  for (int i = 0; i < 5; ++i) {
    chain.samples.push_back({0.1 * (i + 1), {}});
    chain.potentials.push_back(i == 3 ? 0.0 : 1.0);
    chain.accepted.push_back(1);
  }
  const PriorConfig prior{OrderPrior(0.0, 1.0), CoefficientPrior(0, 2.0, 0.5)};
  const PosteriorSummary s = posterior_summary(chain, prior, 1);
  EXPECT_NEAR(s.mean, 0.35, 1e-15);
  EXPECT_DOUBLE_EQ(s.mode, 0.4);
  EXPECT_THROW(posterior_summary(chain, prior, 5), std::invalid_argument);
}

TEST(DensityCsv, Format) {
  const PosteriorDensity1D d = PosteriorDensity1D::normalized({0.0, 0.5, 1.0}, {1.0, 1.0, 1.0});
  std::ostringstream out;
  write_density_csv(out, d);
  EXPECT_EQ(out.str(), "s,weight\n0,1\n0.5,1\n1,1\n");
}

}  // namespace
}  // namespace fracbayes
