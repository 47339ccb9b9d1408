#include "fracbayes/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "fracbayes/error.hpp"
#include "fracbayes/neumann_solver.hpp"

namespace fracbayes {

double hellinger_1d(const PosteriorDensity1D& p, const PosteriorDensity1D& q) {
  detail::require(p.size() == q.size(), "Hellinger distance needs identical grids");
  const auto& g = p.grid();
  for (std::size_t i = 0; i < g.size(); ++i) {
    detail::require(std::abs(g[i] - q.grid()[i]) <= 1e-12 * (1.0 + std::abs(g[i])),
                    "Hellinger distance needs identical grids");
  }
  std::vector<double> sq(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = std::sqrt(p.weights()[i]) - std::sqrt(q.weights()[i]);
    sq[i] = d * d;
  }
  return std::sqrt(std::max(0.0, 0.5 * trapezoid(g, sq)));
}

HellingerReport wellposedness_sweep(const DataVector& data, const std::vector<double>& epsilons,
                                    const Eigen::VectorXd& direction,
                                    const PosteriorOfData& posterior_of,
                                    std::optional<double> radius) {
  detail::require(direction.size() == data.y.size(), "perturbation direction has the wrong length");
  const double dir_norm = direction.norm();
  detail::require(dir_norm > 0.0, "perturbation direction must be nonzero");
  const Eigen::VectorXd unit = direction / dir_norm;
  if (radius) detail::require(data.y.norm() <= *radius, "data lies outside the stability ball");

  const PosteriorDensity1D base = posterior_of(data);
  HellingerReport report{};
  report.max_ratio = 0.0;
  report.min_ratio = std::numeric_limits<double>::infinity();
  std::vector<double> log_eps, log_d;
  for (double eps : epsilons) {
    detail::require(std::isfinite(eps) && eps >= 0.0, "perturbation sizes must be >= 0");
    DataVector shifted = data;
    shifted.y += eps * unit;
    if (radius) {
      detail::require(shifted.y.norm() <= *radius, "perturbed data leaves the stability ball");
    }
    const double d = eps == 0.0 ? hellinger_1d(base, base) : hellinger_1d(base, posterior_of(shifted));
    const double ratio = eps > 0.0 ? d / eps : 0.0;
    report.points.push_back({eps, d, ratio});
    if (eps > 0.0) {
      report.max_ratio = std::max(report.max_ratio, ratio);
      report.min_ratio = std::min(report.min_ratio, ratio);
      if (d > 0.0) {
        log_eps.push_back(std::log(eps));
        log_d.push_back(std::log(d));
      }
    }
  }
  report.slope = std::numeric_limits<double>::quiet_NaN();
  if (log_eps.size() >= 2) {
    const auto n = static_cast<double>(log_eps.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < log_eps.size(); ++i) {
      mx += log_eps[i];
      my += log_d[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < log_eps.size(); ++i) {
      sxy += (log_eps[i] - mx) * (log_d[i] - my);
      sxx += (log_eps[i] - mx) * (log_eps[i] - mx);
    }
    if (sxx > 0.0) report.slope = sxy / sxx;
  }
  if (!std::isfinite(report.min_ratio)) report.min_ratio = 0.0;
  return report;
}

double op_norm_diff(const Mesh1D& mesh, const Coefficient& a, const Coefficient& a_prime,
                    double rel_tol, int max_iterations) {
  const AssembledOperator op = assemble(mesh, a);
  const AssembledOperator op_prime = assemble(mesh, a_prime);
  const NeumannSolver solver(op);
  const NeumannSolver solver_prime(op_prime);
  const SparseMatrix& mass = op.mass;

  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd v(mesh.n_nodes());
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = normal(rng);
  v.array() -= mean_value(mass, v);
  v /= l2_norm(mass, v);

  double estimate = 0.0;
  double change = std::numeric_limits<double>::infinity();
  for (int it = 0; it < max_iterations; ++it) {
    const Eigen::VectorXd w = solver.apply_inverse(v) - solver_prime.apply_inverse(v);
    const double norm = l2_norm(mass, w);
    if (norm == 0.0) return 0.0;
    change = std::abs(norm - estimate);
    estimate = norm;
    v = w / norm;
    if (it > 2 && change <= rel_tol * estimate) return estimate;
  }
  throw NumericalError("power iteration stagnated: relative change " +
                       std::to_string(change / estimate) + " after " +
                       std::to_string(max_iterations) + " iterations");
}

PerturbationReport eigen_perturbation_check(const Mesh1D& mesh, const Coefficient& a,
                                            const Coefficient& a_prime, int n_pairs) {
  detail::require(n_pairs >= 1, "need at least one eigenpair");
  detail::require(n_pairs + 1 <= mesh.n_nodes() - 1, "mesh too coarse for the requested pairs");
  const int pool = std::min(n_pairs + 2, mesh.n_nodes() - 1);
  const EigenSystem eig = eigendecompose(assemble(mesh, a), pool);
  const EigenSystem eig_prime = eigendecompose(assemble(mesh, a_prime), n_pairs);

  PerturbationReport r;
  r.coefficient_gap = sup_distance(a, a_prime);
  r.op_norm = op_norm_diff(mesh, a, a_prime);
  r.op_norm_ratio =
      r.coefficient_gap > 0.0 ? r.op_norm * a.lower() * a_prime.lower() / r.coefficient_gap : 0.0;

  r.min_reciprocal_gap = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_pairs; ++i) {
    const double ri = 1.0 / eig.eigenvalue(i);
    if (i > 0) r.min_reciprocal_gap = std::min(r.min_reciprocal_gap, 1.0 / eig.eigenvalue(i - 1) - ri);
    if (i + 1 < eig.size()) {
      r.min_reciprocal_gap = std::min(r.min_reciprocal_gap, ri - 1.0 / eig.eigenvalue(i + 1));
    }
  }
  r.applicable = r.min_reciprocal_gap > 2.0 * r.op_norm;

  const Eigen::MatrixXd mass_vectors = eig.mass() * eig.eigenvectors();
  std::vector<bool> used(static_cast<std::size_t>(pool), false);
  for (int i = 0; i < n_pairs; ++i) {
    const Eigen::VectorXd target = eig_prime.eigenvector(i);
    const Eigen::VectorXd overlaps = mass_vectors.transpose() * target;
    int best = -1;
    for (int j = 0; j < pool; ++j) {
      if (used[j]) continue;
      if (best < 0 || std::abs(overlaps[j]) > std::abs(overlaps[best])) best = j;
    }
    used[best] = true;
    const double sign = overlaps[best] >= 0.0 ? 1.0 : -1.0;
    const Eigen::VectorXd diff = target - sign * eig.eigenvector(best);
    const double dist = l2_norm(eig.mass(), diff);
    const double gap = std::abs(1.0 / eig.eigenvalue(i) - 1.0 / eig_prime.eigenvalue(i));
    r.matched_indices.push_back(best);
    r.vector_distances.push_back(dist);
    r.reciprocal_gaps.push_back(gap);
    r.distance_ratios.push_back(r.coefficient_gap > 0.0 ? dist / r.coefficient_gap : 0.0);
    r.reciprocal_ratios.push_back(r.coefficient_gap > 0.0 ? gap / r.coefficient_gap : 0.0);
  }
  return r;
}

double forward_lipschitz_probe(double s, const Mesh1D& mesh, const Coefficient& a,
                               const Coefficient& a_prime, const Field& f,
                               std::optional<int> n_modes) {
  const double gap = sup_distance(a, a_prime);
  if (gap == 0.0) return 0.0;
  const int k = n_modes.value_or(default_mode_count(mesh.n_nodes()));
  const EigenSystem eig = eigendecompose(assemble(mesh, a), k);
  const EigenSystem eig_prime = eigendecompose(assemble(mesh, a_prime), k);
  const Field diff = fractional_solve(eig, f, s) - fractional_solve(eig_prime, f, s);
  return hs_seminorm(eig, diff, s) / gap;
}

double holder_seminorm(const Mesh1D& mesh, const Eigen::VectorXd& v, double alpha) {
  detail::require(v.size() == mesh.n_nodes(), "field does not match the mesh");
  detail::require(alpha > 0.0 && alpha <= 1.0, "Holder exponent must lie in (0, 1]");
  double best = 0.0;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    for (int j = i + 1; j < mesh.n_nodes(); ++j) {
      const double dx = std::pow(mesh.node(j) - mesh.node(i), alpha);
      best = std::max(best, std::abs(v[j] - v[i]) / dx);
    }
  }
  return best;
}

HolderCheck holder_interpolation_check(const Mesh1D& mesh, const Eigen::VectorXd& p,
                                       const Eigen::VectorXd& q, double alpha, double constant) {
  detail::require(p.size() == q.size(), "fields differ in size");
  const Eigen::VectorXd diff = p - q;
  const double lhs = diff.cwiseAbs().maxCoeff();
  const double seminorm = std::max(holder_seminorm(mesh, p, alpha), holder_seminorm(mesh, q, alpha));
  const double l2 = l2_norm(assemble_mass(mesh), diff);
  const double d = 1.0;
  const double rhs = constant * std::pow(seminorm, d / (2.0 * alpha + d)) *
                     std::pow(l2, 2.0 * alpha / (2.0 * alpha + d));
  return {lhs <= rhs, lhs, rhs, rhs - lhs};
}

ConcentrationCheck check_concentration(const std::vector<std::vector<double>>& std_table,
                                       int max_inversions, double tolerance) {
  detail::require(!std_table.empty(), "std table is empty");
  const std::size_t cols = std_table.front().size();
  for (const auto& row : std_table) detail::require(row.size() == cols, "std table is ragged");
  ConcentrationCheck c{true, 0, 0.0};
  auto visit = [&](double before, double after) {
    if (after > before) {
      ++c.inversions;
      c.worst_increase = std::max(c.worst_increase, (after - before) / before);
    }
  };
  for (std::size_t r = 0; r < std_table.size(); ++r) {
    for (std::size_t k = 0; k < cols; ++k) {
      if (k + 1 < cols) visit(std_table[r][k], std_table[r][k + 1]);
      if (r + 1 < std_table.size()) visit(std_table[r][k], std_table[r + 1][k]);
    }
  }
  c.pass = c.inversions <= max_inversions && c.worst_increase <= tolerance;
  return c;
}

CoefficientPairDraw draw_coefficient_pair(const CoefficientPrior& prior, std::mt19937_64& rng) {
  detail::require(prior.n_kl() >= 1, "coefficient pairs need at least one KL mode");
  std::normal_distribution<double> normal(0.0, 1.0);
  CoefficientPairDraw d;
  d.xi.resize(static_cast<std::size_t>(prior.n_kl()));
  d.eta.resize(static_cast<std::size_t>(prior.n_kl()));
  for (double& v : d.xi) v = normal(rng);
  for (double& v : d.eta) v = normal(rng);
  return d;
}

std::pair<Coefficient, Coefficient> realize_pair(const CoefficientPairDraw& draw,
                                                 const CoefficientPrior& prior, const Mesh1D& mesh,
                                                 double size) {
  detail::require(size >= 0.0 && std::isfinite(size), "perturbation size must be >= 0");
  Coefficient a = realize_coefficient(prior, draw.xi, mesh);
  std::vector<double> r(static_cast<std::size_t>(mesh.n_cells()));
  double peak = 0.0;
  for (int c = 0; c < mesh.n_cells(); ++c) {
    r[c] = prior.log_field(draw.eta, mesh, mesh.midpoint(c));
    peak = std::max(peak, std::abs(r[c]));
  }
  std::vector<double> shifted(a.values().begin(), a.values().end());
  for (std::size_t c = 0; c < shifted.size(); ++c) {
    if (peak > 0.0) shifted[c] += size * r[c] / peak;
    detail::require(shifted[c] > 0.0, "perturbation makes the coefficient non-positive");
  }
  return {std::move(a), Coefficient(std::move(shifted))};
}

}  // namespace fracbayes
