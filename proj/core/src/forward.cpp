#include "fracbayes/forward.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "fracbayes/error.hpp"
#include "fracbayes/extension.hpp"

namespace fracbayes {

namespace {

void require_nonresonant(double b) {
  detail::require(std::isfinite(b), "source frequency b must be finite");
  detail::require(std::abs(b - std::round(b)) > 1e-12,
                  "source frequency b must not be an integer (resonance with the spectrum)");
}

double interpolate_at(const Mesh1D& mesh, const Eigen::VectorXd& p, double x) {
  const int c = mesh.locate(x);
  const double t = (x - mesh.node(c)) / mesh.h();
  return (1.0 - t) * p[c] + t * p[c + 1];
}

}  // namespace

ObservationSetup grid_observation_setup(int m, double noise_std, double x_left, double x_right) {
  detail::require(m >= 0, "observation count must be non-negative");
  detail::require(std::isfinite(noise_std) && noise_std >= 0.0, "noise level must be >= 0");
  detail::require(x_left < x_right, "observation interval is degenerate");
  ObservationSetup setup;
  setup.noise_std = noise_std;
  if (m == 1) {
    setup.points = {x_right};
  } else if (m >= 2) {
    const double h = (x_right - x_left) / (m - 1);
    setup.points.resize(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) setup.points[j] = x_left + j * h;
    setup.points.back() = x_right;
  }
  return setup;
}

SparseMatrix pointwise_operator(const Mesh1D& mesh, const std::vector<double>& points) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(2 * points.size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    const double x = points[j];
    const int c = mesh.locate(x);
    const double t = (x - mesh.node(c)) / mesh.h();
    const auto row = static_cast<Eigen::Index>(j);
    if (1.0 - t != 0.0) triplets.emplace_back(row, c, 1.0 - t);
    if (t != 0.0) triplets.emplace_back(row, c + 1, t);
  }
  SparseMatrix op(static_cast<Eigen::Index>(points.size()), mesh.n_nodes());
  op.setFromTriplets(triplets.begin(), triplets.end());
  return op;
}

Eigen::VectorXd observe_pointwise(const Mesh1D& mesh, const Eigen::VectorXd& p,
                                  const ObservationSetup& setup) {
  detail::require(p.size() == mesh.n_nodes(), "field does not match the mesh");
  Eigen::VectorXd out(setup.size());
  for (int j = 0; j < setup.size(); ++j) out[j] = interpolate_at(mesh, p, setup.points[j]);
  return out;
}

Eigen::VectorXd observe_average(const Mesh1D& mesh, const Eigen::VectorXd& p,
                                const std::vector<Window>& windows) {
  detail::require(p.size() == mesh.n_nodes(), "field does not match the mesh");
  Eigen::VectorXd out(static_cast<Eigen::Index>(windows.size()));
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto [lo, hi] = windows[w];
    detail::require(hi > lo, "averaging window must have positive length");
    detail::require(mesh.contains(lo) && mesh.contains(hi), "averaging window leaves the domain");
    double integral = 0.0;
    double x_prev = lo;
    double v_prev = interpolate_at(mesh, p, lo);
    for (int i = 0; i < mesh.n_nodes(); ++i) {
      const double x = mesh.node(i);
      if (x <= lo || x >= hi) continue;
      integral += 0.5 * (x - x_prev) * (v_prev + p[i]);
      x_prev = x;
      v_prev = p[i];
    }
    integral += 0.5 * (hi - x_prev) * (v_prev + interpolate_at(mesh, p, hi));
    out[static_cast<Eigen::Index>(w)] = integral / (hi - lo);
  }
  return out;
}

Eigen::VectorXd forward_G(double s, const Coefficient& a, const Mesh1D& mesh, const Field& f,
                          const ObservationSetup& setup, SolverKind solver,
                          const ForwardOptions& options) {
  const AssembledOperator op = assemble(mesh, a);
  if (solver == SolverKind::spectral) {
    const int k = options.n_modes.value_or(default_mode_count(mesh.n_nodes()));
    const EigenSystem eig = eigendecompose(op, k);
    return observe_pointwise(mesh, fractional_solve(eig, f, s).values(), setup);
  }
  const ExtensionGrid grid = make_extension_grid(mesh, s, options.extension_levels,
                                                 options.extension_y_max,
                                                 options.extension_grading);
  const ExtensionField ext = solve_extension(a, s, f, grid);
  return observe_pointwise(mesh, ext.trace(), setup);
}

SpectralForwardMap::SpectralForwardMap(const AssembledOperator& op, const Field& f,
                                       const ObservationSetup& setup, std::optional<int> n_modes)
    : SpectralForwardMap(
          eigendecompose(op, n_modes.value_or(default_mode_count(op.n_nodes()))), op.mesh, f,
          setup) {}

SpectralForwardMap::SpectralForwardMap(EigenSystem eig, const Mesh1D& mesh, const Field& f,
                                       const ObservationSetup& setup)
    : eig_(std::move(eig)) {
  detail::require(eig_.n_nodes() == mesh.n_nodes(), "eigensystem does not match the mesh");
  source_modes_ = eig_.modal_coefficients(f.values());
  observed_modes_ = pointwise_operator(mesh, setup.points) * eig_.eigenvectors();
}

Eigen::VectorXd SpectralForwardMap::evaluate(double s) const {
  detail::require(std::isfinite(s) && s >= 0.0 && s <= 1.0, "fractional order must lie in [0, 1]");
  const Eigen::VectorXd scaled =
      (source_modes_.array() * eig_.eigenvalues().array().pow(-s)).matrix();
  return observed_modes_ * scaled;
}

Field SpectralForwardMap::solution(double s) const {
  detail::require(std::isfinite(s) && s >= 0.0 && s <= 1.0, "fractional order must lie in [0, 1]");
  return eig_.synthesize((source_modes_.array() * eig_.eigenvalues().array().pow(-s)).matrix());
}

double analytic_source(double b, double x) {
  require_nonresonant(b);
  const double pi = std::numbers::pi;
  return std::cos(b * x) - std::sin(b * pi) / (b * pi);
}

double analytic_fourier_coefficient(double b, int k) {
  require_nonresonant(b);
  detail::require(k >= 1, "Fourier index starts at 1");
  const double pi = std::numbers::pi;
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double kk = static_cast<double>(k);
  return sign * 2.0 * b * std::sin(b * pi) / (pi * (b * b - kk * kk));
}

SeriesValue analytic_solution(double b, double s, double x, int k_terms) {
  require_nonresonant(b);
  detail::require(s >= 0.0 && s <= 1.0, "fractional order must lie in [0, 1]");
  detail::require(k_terms >= 16, "analytic series needs at least 16 terms");
  detail::require(k_terms > std::abs(b), "series truncation must exceed |b|");
  double sum = 0.0;
  for (int k = k_terms; k >= 1; --k) {  // small terms first
    const double kk = static_cast<double>(k);
    sum += analytic_fourier_coefficient(b, k) * std::pow(kk, -2.0 * s) * std::cos(kk * x);
  }
  // |f_k| k^{-2s} <= 2|b sin(b pi)|/pi * k^{-2-2s} / (1 - b^2/K^2) for k > K.
  const double pi = std::numbers::pi;
  const double kk = static_cast<double>(k_terms);
  const double tail = 2.0 * std::abs(b * std::sin(b * pi)) / pi *
                      std::pow(kk, -1.0 - 2.0 * s) / ((1.0 + 2.0 * s) * (1.0 - b * b / (kk * kk)));
  return {sum, tail};
}

Field analytic_source_field(double b, const Mesh1D& mesh) {
  require_nonresonant(b);
  return Field::zero_mean(interpolate(mesh, [b](double x) { return analytic_source(b, x); }),
                          assemble_mass(mesh));
}

DataVector add_noise(const Eigen::VectorXd& noiseless, const ObservationSetup& setup,
                     std::uint64_t seed) {
  detail::require(noiseless.size() == setup.size(), "observation count mismatch");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  DataVector data{setup, noiseless, seed};
  for (Eigen::Index j = 0; j < data.y.size(); ++j) data.y[j] += setup.noise_std * normal(rng);
  return data;
}

DataVector synth_data(double s_star, const Coefficient& a_star, double b, const Mesh1D& mesh,
                      const ObservationSetup& setup, std::uint64_t seed,
                      const ForwardOptions& options) {
  const Field f = analytic_source_field(b, mesh);
  const Eigen::VectorXd g = forward_G(s_star, a_star, mesh, f, setup, SolverKind::spectral, options);
  return add_noise(g, setup, seed);
}

}  // namespace fracbayes
