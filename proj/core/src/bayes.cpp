#include "fracbayes/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "fracbayes/error.hpp"

namespace fracbayes {

double trapezoid(const std::vector<double>& grid, const std::vector<double>& values) {
  detail::require(grid.size() == values.size(), "trapezoid: grid and values differ in length");
  double sum = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    sum += 0.5 * (grid[i] - grid[i - 1]) * (values[i] + values[i - 1]);
  }
  return sum;
}

PosteriorDensity1D PosteriorDensity1D::normalized(std::vector<double> grid,
                                                  std::vector<double> weights) {
  detail::require(grid.size() >= 2, "density grid needs at least two points");
  detail::require(grid.size() == weights.size(), "density grid and weights differ in length");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    detail::require(grid[i] > grid[i - 1], "density grid must be strictly increasing");
  }
  for (double w : weights) {
    detail::require(std::isfinite(w) && w >= 0.0, "density weights must be finite and >= 0");
  }
  const double z = trapezoid(grid, weights);
  if (!(z > 0.0) || !std::isfinite(z)) {
    throw NumericalError("posterior normalization is ill-conditioned (Z = " + std::to_string(z) +
                         ")");
  }
  for (double& w : weights) w /= z;
  return PosteriorDensity1D(std::move(grid), std::move(weights), z);
}

double misfit_potential(const Eigen::VectorXd& y, const Eigen::VectorXd& g, double gamma) {
  detail::require(y.size() == g.size(), "data and prediction differ in length");
  detail::require(gamma > 0.0, "noise level must be positive");
  return 0.5 * (y - g).squaredNorm() / (gamma * gamma);
}

JointForwardModel::JointForwardModel(Mesh1D mesh, Field source, ObservationSetup setup,
                                     CoefficientPrior prior, std::optional<int> n_modes)
    : mesh_(std::move(mesh)),
      source_(std::move(source)),
      setup_(std::move(setup)),
      prior_(prior),
      n_modes_(n_modes) {
  detail::require(source_.size() == mesh_.n_nodes(), "source does not match the mesh");
}

Eigen::VectorXd JointForwardModel::evaluate(const ParamPoint& u) {
  if (!cached_xi_ || *cached_xi_ != u.xi) {
    const Coefficient a = realize_coefficient(prior_, u.xi, mesh_);
    cached_map_.reset();
    cached_map_.emplace(assemble(mesh_, a), source_, setup_, n_modes_);
    cached_xi_ = u.xi;
    ++eigendecompositions_;
  }
  return cached_map_->evaluate(u.s);
}

double potential(const ParamPoint& u, const DataVector& data, JointForwardModel& model) {
  if (data.y.size() == 0) return 0.0;
  detail::require(data.y.size() == model.setup().size(), "data does not match the model setup");
  return misfit_potential(data.y, model.evaluate(u), data.setup.noise_std);
}

PosteriorDensity1D posterior_grid_1d(const OrderPrior& prior, int n_grid,
                                     const std::function<double(double)>& potential_of_s) {
  detail::require(n_grid >= 51, "posterior grid needs at least 51 points");
  std::vector<double> grid(static_cast<std::size_t>(n_grid));
  std::vector<double> log_w(grid.size());
  double max_log = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_grid; ++i) {
    grid[i] = prior.lo() + (prior.hi() - prior.lo()) * i / (n_grid - 1);
  }
  grid.back() = prior.hi();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double phi = potential_of_s(grid[i]);
    if (std::isnan(phi)) throw NumericalError("potential evaluated to NaN");
    log_w[i] = prior.log_density(grid[i]) - phi;
    max_log = std::max(max_log, log_w[i]);
  }
  if (!std::isfinite(max_log)) {
    throw NumericalError("all posterior weights underflow; normalization is ill-conditioned");
  }
  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) w[i] = std::exp(log_w[i] - max_log);
  return PosteriorDensity1D::normalized(std::move(grid), std::move(w));
}

PosteriorDensity1D posterior_grid_1d(const DataVector& data, const OrderPrior& prior,
                                     const SpectralForwardMap& forward, int n_grid) {
  if (data.y.size() == 0) {
    return posterior_grid_1d(prior, n_grid, [](double) { return 0.0; });
  }
  detail::require(data.y.size() == forward.n_observations(),
                  "data does not match the forward map");
  const double gamma = data.setup.noise_std;
  return posterior_grid_1d(prior, n_grid, [&](double s) {
    return misfit_potential(data.y, forward.evaluate(s), gamma);
  });
}

bool metropolis_accept(double log_ratio, double uniform) {
  if (log_ratio >= 0.0) return true;
  return std::log(uniform) < log_ratio;
}

double reflect_into(double x, double lo, double hi) {
  const double width = hi - lo;
  double y = std::fmod(x - lo, 2.0 * width);
  if (y < 0.0) y += 2.0 * width;
  if (y > width) y = 2.0 * width - y;
  return lo + y;
}

Chain pcn_mcmc(const DataVector& data, JointForwardModel& model, const PriorConfig& prior,
               const McmcOptions& options, std::uint64_t seed) {
  detail::require(options.beta > 0.0 && options.beta <= 1.0, "pCN beta must lie in (0, 1]");
  detail::require(options.n_steps >= 1, "chain needs at least one step");
  detail::require(options.s_step > 0.0, "order random-walk step must be positive");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> order_draw(prior.order.lo(), prior.order.hi());
  const double contraction = std::sqrt(1.0 - options.beta * options.beta);

  ParamPoint current = sample_prior(prior, rng);
  double phi_current = potential(current, data, model);

  Chain chain;
  chain.beta = options.beta;
  chain.s_step = options.s_step;
  chain.samples.reserve(static_cast<std::size_t>(options.n_steps));
  chain.potentials.reserve(static_cast<std::size_t>(options.n_steps));
  chain.accepted.reserve(static_cast<std::size_t>(options.n_steps));

  int accepted = 0;
  int rejection_run = 0;
  for (int step = 0; step < options.n_steps; ++step) {
    ParamPoint proposal;
    proposal.xi.resize(current.xi.size());
    for (std::size_t k = 0; k < current.xi.size(); ++k) {
      proposal.xi[k] = contraction * current.xi[k] + options.beta * normal(rng);
    }
    if (options.order_proposal == OrderProposal::reflected_walk) {
      proposal.s = reflect_into(current.s + options.s_step * normal(rng), prior.order.lo(),
                                prior.order.hi());
    } else {
      proposal.s = order_draw(rng);
    }
    const double phi_proposal = potential(proposal, data, model);
    const bool accept = metropolis_accept(phi_current - phi_proposal, unit(rng));
    if (accept) {
      current = std::move(proposal);
      phi_current = phi_proposal;
      ++accepted;
      rejection_run = 0;
    } else {
      ++rejection_run;
      chain.longest_rejection_run = std::max(chain.longest_rejection_run, rejection_run);
    }
    chain.samples.push_back(current);
    chain.potentials.push_back(phi_current);
    chain.accepted.push_back(accept ? 1 : 0);
  }
  chain.acceptance_rate = static_cast<double>(accepted) / options.n_steps;
  return chain;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

double density_quantile(const PosteriorDensity1D& d, const std::vector<double>& cdf, double q) {
  const auto& g = d.grid();
  for (std::size_t i = 1; i < g.size(); ++i) {
    if (cdf[i] >= q) {
      const double span = cdf[i] - cdf[i - 1];
      const double t = span > 0.0 ? (q - cdf[i - 1]) / span : 0.0;
      return g[i - 1] + t * (g[i] - g[i - 1]);
    }
  }
  return g.back();
}

}  // namespace

PosteriorSummary posterior_summary(const PosteriorDensity1D& density) {
  const auto& g = density.grid();
  const auto& w = density.weights();
  std::vector<double> first(g.size()), second(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) first[i] = g[i] * w[i];
  const double mean = trapezoid(g, first);
  for (std::size_t i = 0; i < g.size(); ++i) second[i] = (g[i] - mean) * (g[i] - mean) * w[i];
  const double var = trapezoid(g, second);

  std::vector<double> cdf(g.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    cdf[i] = cdf[i - 1] + 0.5 * (g[i] - g[i - 1]) * (w[i] + w[i - 1]);
  }
  const auto mode_it = std::max_element(w.begin(), w.end());
  return {mean, std::sqrt(std::max(0.0, var)), g[static_cast<std::size_t>(mode_it - w.begin())],
          density_quantile(density, cdf, 0.05), density_quantile(density, cdf, 0.95)};
}

PosteriorSummary posterior_summary(const Chain& chain, const PriorConfig& prior, int burn_in) {
  detail::require(burn_in >= 0, "burn-in must be non-negative");
  if (chain.samples.size() <= static_cast<std::size_t>(burn_in)) {
    throw std::invalid_argument("chain has no samples after burn-in");
  }
  std::vector<double> s;
  s.reserve(chain.samples.size() - static_cast<std::size_t>(burn_in));
  double best = std::numeric_limits<double>::infinity();
  double mode = chain.samples[static_cast<std::size_t>(burn_in)].s;
  for (std::size_t i = static_cast<std::size_t>(burn_in); i < chain.samples.size(); ++i) {
    s.push_back(chain.samples[i].s);
    const double score = chain.potentials[i] - log_prior_density(prior, chain.samples[i]);
    if (score < best) {
      best = score;
      mode = chain.samples[i].s;
    }
  }
  double mean = 0.0;
  for (double v : s) mean += v;
  mean /= static_cast<double>(s.size());
  double var = 0.0;
  for (double v : s) var += (v - mean) * (v - mean);
  var = s.size() > 1 ? var / static_cast<double>(s.size() - 1) : 0.0;
  std::sort(s.begin(), s.end());
  return {mean, std::sqrt(var), mode, quantile_sorted(s, 0.05), quantile_sorted(s, 0.95)};
}

void write_density_csv(std::ostream& out, const PosteriorDensity1D& density) {
  const auto old_precision = out.precision(17);
  out << "s,weight\n";
  for (std::size_t i = 0; i < density.size(); ++i) {
    out << density.grid()[i] << ',' << density.weights()[i] << '\n';
  }
  out.precision(old_precision);
}

void write_chain_csv(std::ostream& out, const Chain& chain) {
  const auto old_precision = out.precision(17);
  const std::size_t n_xi = chain.samples.empty() ? 0 : chain.samples.front().xi.size();
  out << "step,s";
  for (std::size_t k = 1; k <= n_xi; ++k) out << ",xi_" << k;
  out << ",phi,accepted\n";
  for (std::size_t i = 0; i < chain.samples.size(); ++i) {
    out << i << ',' << chain.samples[i].s;
    for (double x : chain.samples[i].xi) out << ',' << x;
    out << ',' << chain.potentials[i] << ',' << static_cast<int>(chain.accepted[i]) << '\n';
  }
  out.precision(old_precision);
}

}  // namespace fracbayes
