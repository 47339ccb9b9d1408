#include "fracbayes/app/commands.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

#include "fracbayes/diagnostics.hpp"
#include "fracbayes/error.hpp"
#include "fracbayes/extension.hpp"
#include "fracbayes/neumann_solver.hpp"
#include "fracbayes/serialization.hpp"
#include "json.hpp"

namespace fracbayes::app {

namespace {

using ordered_json = nlohmann::ordered_json;
constexpr double kPi = std::numbers::pi;

// Collects output files in memory so nothing is written unless the command succeeds.
class OutputSet {
 public:
  void add(std::string name, std::string content) {
    files_.emplace_back(std::move(name), std::move(content));
  }

  void commit(const std::filesystem::path& dir, std::ostream& log) const {
    std::filesystem::create_directories(dir);
    for (const auto& [name, content] : files_) {
      const std::filesystem::path path = dir / name;
      std::ofstream out(path, std::ios::binary | std::ios::trunc);
      out << content;
      if (!out) throw std::runtime_error("cannot write " + path.string());
      log << "wrote " << path.string() << '\n';
    }
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

std::string csv_stamp(const RunConfig& c) {
  return "# fracbayes config_hash=" + config_hash(c) + " seed=" + std::to_string(c.seed) + "\n";
}

ordered_json json_stamp(const RunConfig& c, const std::string& command) {
  ordered_json j;
  j["command"] = command;
  j["config_hash"] = config_hash(c);
  j["seed"] = c.seed;
  return j;
}

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

DataVector load_data_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open data file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return data_from_json(buffer.str());
}

// Observed data for the configured observation block: the data file when one
// is given, otherwise synthetic data from the truth under `map`.
DataVector observed_data(const RunConfig& c, const SpectralForwardMap& map,
                         const ObservationSetup& setup) {
  if (c.observation.data_file) {
    DataVector d = load_data_file(*c.observation.data_file);
    if (d.setup.points != setup.points) {
      throw ConfigError("config: data file points do not match observation.m = " +
                        std::to_string(setup.size()));
    }
    return d;
  }
  return add_noise(map.evaluate(c.truth.s), setup, c.seed);
}

ordered_json summary_json(const PosteriorSummary& s) {
  return {{"mean", s.mean}, {"std", s.std}, {"mode", s.mode}, {"ci_lo", s.ci_lo}, {"ci_hi", s.ci_hi}};
}

CheckResult make_check(std::string name, double value, std::string relation, double bound,
                       std::string note = {}) {
  bool pass = false;
  if (relation == "<=") pass = value <= bound;
  if (relation == ">=") pass = value >= bound;
  if (relation == "<") pass = value < bound;
  return {std::move(name), value, std::move(relation), bound, pass && std::isfinite(value),
          std::move(note)};
}

double relative(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const SparseMatrix& mass) {
  const double denom = l2_norm(mass, b);
  return l2_norm(mass, a - b) / (denom > 0.0 ? denom : 1.0);
}

// Checks run on the configured mesh with the truth coefficient.
void spectral_checks(const RunConfig& c, std::vector<CheckResult>& out) {
  const Mesh1D mesh = c.make_mesh();
  AssembledOperator op = assemble(mesh, c.truth_coefficient(mesh));
  if (c.verify.corrupt_stiffness) op.stiffness.coeffRef(0, 0) *= 1.01;

  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(mesh.n_nodes());
  const double k_scale = op.stiffness.coeffs().cwiseAbs().maxCoeff();
  out.push_back(make_check("stiffness_null_space", (op.stiffness * ones).cwiseAbs().maxCoeff() / k_scale,
                           "<=", 1e-12, "max |K 1| / max |K_ij|"));
  const SparseMatrix asym = SparseMatrix(op.stiffness.transpose()) - op.stiffness;
  out.push_back(make_check("stiffness_symmetry",
                           asym.nonZeros() ? asym.coeffs().cwiseAbs().maxCoeff() / k_scale : 0.0,
                           "<=", 1e-14));

  const int k = c.solver.n_modes.value_or(default_mode_count(mesh.n_nodes()));
  const EigenSystem eig = eigendecompose(op, k);
  out.push_back(make_check("eigen_orthonormality", eig.orthonormality_residual(), "<=", 1e-10));

  const Field f = analytic_source_field(c.truth.b, mesh);
  const Field pf = eig.project(f.values());
  double inverse_pair = 0.0;
  for (double s : {0.3, 0.7}) {
    inverse_pair = std::max(inverse_pair, relative(fractional_apply(eig, fractional_solve(eig, f, s), s).values(),
                                                   pf.values(), eig.mass()));
  }
  out.push_back(make_check("inverse_pair", inverse_pair, "<=", 1e-10));
  const Eigen::VectorXd twice = fractional_solve(eig, fractional_solve(eig, f, 0.3), 0.4).values();
  out.push_back(make_check("semigroup", relative(twice, fractional_solve(eig, f, 0.7).values(), eig.mass()),
                           "<=", 1e-10));
}

void direct_solve_check(const RunConfig& c, std::vector<CheckResult>& out) {
  const int n = std::min(c.mesh.n_cells, 128);
  const Mesh1D mesh(c.mesh.x_left, c.mesh.x_right, n);
  const AssembledOperator op = assemble(mesh, c.truth_coefficient(mesh));
  const EigenSystem eig = eigendecompose(op, n);
  const Field f = analytic_source_field(c.truth.b, mesh);
  const Eigen::VectorXd direct = NeumannSolver(op).apply_inverse(f.values());
  out.push_back(make_check("integer_order_direct_solve",
                           relative(fractional_solve(eig, f, 1.0).values(), direct, eig.mass()), "<=",
                           1e-8, "full basis on " + std::to_string(n) + " cells"));
}

void toy_series_check(const RunConfig& c, std::vector<CheckResult>& out) {
  const Mesh1D mesh(-kPi, kPi, c.mesh.n_cells);
  const int k = c.solver.n_modes.value_or(default_mode_count(mesh.n_nodes()));
  const EigenSystem eig = eigendecompose(assemble(mesh, Coefficient::constant(mesh.n_cells(), 1.0)), k);
  const double s = std::clamp(c.truth.s, 0.1, 1.0);
  const Field p = fractional_solve(eig, analytic_source_field(c.truth.b, mesh), s);
  double err = 0.0;
  for (int i = 0; i < mesh.n_nodes(); ++i) {
    err = std::max(err, std::abs(p.values()[i] - analytic_solution(c.truth.b, s, mesh.node(i), 20000).value));
  }
  out.push_back(make_check("toy_series_sup_error", err, "<=", 1e-3, "a = 1 on [-pi, pi], s = " + shortest(s)));
}

void extension_checks(const RunConfig& c, std::vector<CheckResult>& out) {
  const Mesh1D mesh(c.mesh.x_left, c.mesh.x_right, c.verify.extension_cells);
  const Coefficient a = c.truth_coefficient(mesh);
  const AssembledOperator op = assemble(mesh, a);
  const EigenSystem eig = eigendecompose(op, default_mode_count(mesh.n_nodes()));
  const Field f = analytic_source_field(c.truth.b, mesh);
  for (double s : {0.3, 0.5, 0.7}) {
    const ExtensionGrid grid =
        make_extension_grid(mesh, s, c.verify.extension_levels, c.solver.y_max, c.solver.grading);
    const ExtensionField ext = solve_extension(a, s, f, grid);
    const Eigen::VectorXd spectral = fractional_solve(eig, f, s).values();
    out.push_back(make_check("extension_trace_s" + shortest(s), relative(ext.trace(), spectral, op.mass),
                             "<=", 5e-2));
  }
}

void wellposedness_checks(const RunConfig& c, std::vector<CheckResult>& out) {
  const Mesh1D mesh = c.make_mesh();
  const ObservationSetup setup =
      grid_observation_setup(std::max(c.observation.m, 1), c.observation.gamma, mesh.x_left(), mesh.x_right());
  const SpectralForwardMap map(assemble(mesh, c.truth_coefficient(mesh)),
                               analytic_source_field(c.truth.b, mesh), setup, c.solver.n_modes);
  const DataVector data = add_noise(map.evaluate(c.truth.s), setup, c.seed);
  const OrderPrior prior(c.prior.s_lo, c.prior.s_hi);
  const HellingerReport r = wellposedness_sweep(
      data, {1e-1, 1e-2, 1e-3}, Eigen::VectorXd::Ones(setup.size()),
      [&](const DataVector& y) { return posterior_grid_1d(y, prior, map, c.n_grid); });
  out.push_back(make_check("wellposedness_ratio_spread", r.max_ratio / r.min_ratio, "<", 2.0,
                           "max/min of D_Hell/eps"));
  out.push_back(make_check("wellposedness_slope_lower", r.slope, ">=", 0.9));
  out.push_back(make_check("wellposedness_slope_upper", r.slope, "<=", 1.1));
}

void perturbation_checks(const RunConfig& c, std::vector<CheckResult>& out) {
  const Mesh1D mesh(c.mesh.x_left, c.mesh.x_right, std::min(c.mesh.n_cells, 256));
  const CoefficientPrior kl(std::max(c.prior.n_kl, 1), c.prior.tau, c.prior.sigma_v);
  const double lambda1 =
      eigendecompose(assemble(mesh, Coefficient::constant(mesh.n_cells(), 1.0)), 1).eigenvalue(0);
  std::mt19937_64 rng(c.seed);
  double op_ratio = 0.0, weyl = 0.0, davis_kahan = 0.0, lipschitz_drift = 0.0;
  int applicable = 0;
  const Field f = analytic_source_field(c.truth.b, mesh);
  for (int t = 0; t < c.verify.trials; ++t) {
    const CoefficientPairDraw draw = draw_coefficient_pair(kl, rng);
    const auto [a, a_prime] = realize_pair(draw, kl, mesh, c.verify.perturbation);
    const double norm = op_norm_diff(mesh, a, a_prime);
    op_ratio = std::max(op_ratio, norm * a.lower() * a_prime.lower() / sup_distance(a, a_prime));

    const auto [b, b_prime] = realize_pair(draw, kl, mesh, c.verify.eigen_perturbation);
    const PerturbationReport r = eigen_perturbation_check(mesh, b, b_prime, c.verify.eigen_pairs);
    for (double gap : r.reciprocal_gaps) weyl = std::max(weyl, gap / r.op_norm);
    if (r.applicable) {
      ++applicable;
      const double bound = std::sqrt(2.0) * r.op_norm / (r.min_reciprocal_gap - r.op_norm);
      for (double d : r.vector_distances) davis_kahan = std::max(davis_kahan, d / bound);
    }

    const double s = std::clamp(c.truth.s, 0.05, 1.0);
    const auto [u, u1] = realize_pair(draw, kl, mesh, 1e-3);
    const auto [v, v1] = realize_pair(draw, kl, mesh, 1e-4);
    const double coarse = forward_lipschitz_probe(s, mesh, u, u1, f, 64);
    const double fine = forward_lipschitz_probe(s, mesh, v, v1, f, 64);
    lipschitz_drift = std::max(lipschitz_drift, std::abs(fine / coarse - 1.0));
  }
  out.push_back(make_check("op_norm_constant", op_ratio, "<=", 1.0 / lambda1,
                           "max ||L_A^-1 - L_A'^-1|| a_min a'_min / ||da||; bound 1/lambda_1(unit)"));
  out.push_back(make_check("reciprocal_eigen_shift", weyl, "<=", 1.0 + 1e-8,
                           "max |1/l_i - 1/l_i'| / op_norm"));
  out.push_back(make_check("eigenvector_shift", davis_kahan, "<=", 1.0,
                           std::to_string(applicable) + " of " + std::to_string(c.verify.trials) +
                               " trials satisfy the gap condition"));
  out.push_back(make_check("eigenvector_gap_condition", applicable, ">=", 1.0));
  out.push_back(make_check("forward_lipschitz_limit", lipschitz_drift, "<=", 1e-2,
                           "relative change of the probe from ||da|| = 1e-3 to 1e-4"));
}

void holder_checks(const RunConfig& c, std::vector<CheckResult>& out) {
  const Mesh1D mesh(c.mesh.x_left, c.mesh.x_right, std::min(c.mesh.n_cells, 256));
  std::mt19937_64 rng(c.seed ^ 0x401d3eULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double length = mesh.x_right() - mesh.x_left();
  int failures = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int t = 0; t < c.verify.holder_trials; ++t) {
    std::vector<double> coef(12);
    for (double& v : coef) v = normal(rng);
    auto field = [&](int offset) {
      return interpolate(mesh, [&](double x) {
        double sum = 0.0;
        for (int k = 1; k <= 6; ++k) {
          sum += coef[offset + k - 1] * std::cos(k * kPi * (x - mesh.x_left()) / length) / (k * k);
        }
        return sum;
      });
    };
    const HolderCheck h = holder_interpolation_check(mesh, field(0), field(6), 0.5, c.verify.holder_constant);
    failures += h.pass ? 0 : 1;
    worst = std::min(worst, h.slack);
  }
  out.push_back(make_check("holder_interpolation_failures", failures, "<=", 0.0,
                           "C = " + shortest(c.verify.holder_constant) + ", smallest slack " + shortest(worst)));
}

int report_numerical(const NumericalError& e, std::ostream& log) {
  log << "numerical failure: " << e.what() << '\n';
  return exit_numerical_error;
}

}  // namespace

std::vector<CheckResult> verification_checks(const RunConfig& c, std::ostream& log) {
  std::vector<CheckResult> results;
  using Stage = void (*)(const RunConfig&, std::vector<CheckResult>&);
  const std::pair<const char*, Stage> stages[] = {
      {"spectral", spectral_checks},
      {"direct_solve", direct_solve_check},
      {"toy_series", toy_series_check},
      {"extension", extension_checks},
      {"wellposedness", wellposedness_checks},
      {"perturbation", perturbation_checks},
      {"holder", holder_checks},
  };
  for (const auto& [name, stage] : stages) {
    const std::size_t before = results.size();
    try {
      stage(c, results);
    } catch (const NumericalError& e) {
      // A stage that cannot even run counts as a failed check.
      results.push_back({std::string(name) + "_stage", std::nan(""), "<=", 0.0, false, e.what()});
    }
    for (std::size_t i = before; i < results.size(); ++i) {
      log << (results[i].pass ? "PASS " : "FAIL ") << results[i].name << " = " << results[i].value
          << ' ' << results[i].relation << ' ' << results[i].bound << '\n';
    }
  }
  return results;
}

int cmd_synth(const RunConfig& c, std::ostream& log) {
  try {
    const Mesh1D mesh = c.make_mesh();
    const ObservationSetup setup =
        grid_observation_setup(c.observation.m, c.observation.gamma, mesh.x_left(), mesh.x_right());
    const Eigen::VectorXd g = forward_G(c.truth.s, c.truth_coefficient(mesh), mesh,
                                        analytic_source_field(c.truth.b, mesh), setup, c.solver.kind,
                                        c.forward_options());
    const DataVector data = add_noise(g, setup, c.seed);
    ordered_json j = json_stamp(c, "synth");
    j["points"] = data.setup.points;
    j["gamma"] = data.setup.noise_std;
    j["y"] = to_vector(data.y);
    j["noiseless"] = to_vector(g);
    j["s_star"] = c.truth.s;
    j["b"] = c.truth.b;
    OutputSet files;
    files.add("data.json", dump(j));
    files.commit(c.out, log);
    return exit_ok;
  } catch (const NumericalError& e) {
    return report_numerical(e, log);
  }
}

int cmd_posterior_grid(const RunConfig& c, std::ostream& log) {
  try {
    const Mesh1D mesh = c.make_mesh();
    const Field f = analytic_source_field(c.truth.b, mesh);
    const OrderPrior prior(c.prior.s_lo, c.prior.s_hi);
    const int k = c.solver.n_modes.value_or(default_mode_count(mesh.n_nodes()));
    // One eigendecomposition serves every cell; only the observation operator changes.
    const EigenSystem eig = eigendecompose(assemble(mesh, c.truth_coefficient(mesh)), k);

    std::vector<int> ms{c.observation.m};
    std::vector<double> gammas{c.observation.gamma};
    if (c.sweep) {
      ms = c.sweep->m;
      gammas = c.sweep->gamma;
    }
    OutputSet files;
    ordered_json summary = json_stamp(c, "posterior-grid");
    summary["s_star"] = c.truth.s;
    summary["n_grid"] = c.n_grid;
    ordered_json cells = ordered_json::array();
    std::ostringstream table;
    table << csv_stamp(c) << "m,gamma,mean,std,mode,ci_lo,ci_hi\n";
    table.precision(17);
    std::vector<std::vector<double>> std_table;
    PosteriorSummary last{};
    for (int m : ms) {
      const ObservationSetup unit = grid_observation_setup(m, 1.0, mesh.x_left(), mesh.x_right());
      const SpectralForwardMap map(eig, mesh, f, unit);
      const Eigen::VectorXd noiseless = map.evaluate(c.truth.s);
      std::vector<double> row;
      for (double gamma : gammas) {
        const ObservationSetup setup{unit.points, gamma};
        DataVector data = c.observation.data_file ? observed_data(c, map, setup)
                                                  : add_noise(noiseless, setup, c.seed);
        const PosteriorDensity1D density = posterior_grid_1d(data, prior, map, c.n_grid);
        const PosteriorSummary s = posterior_summary(density);
        const std::string name =
            c.sweep ? "density_m" + std::to_string(m) + "_gamma" + shortest(gamma) + ".csv" : "density.csv";
        std::ostringstream csv;
        csv << csv_stamp(c);
        write_density_csv(csv, density);
        files.add(name, csv.str());
        ordered_json cell = {{"m", m}, {"gamma", gamma}, {"file", name}};
        cell.update(summary_json(s));
        cell["normalization"] = density.normalization();
        cells.push_back(cell);
        table << m << ',' << gamma << ',' << s.mean << ',' << s.std << ',' << s.mode << ',' << s.ci_lo
              << ',' << s.ci_hi << '\n';
        row.push_back(s.std);
        last = s;
        log << "m = " << m << ", gamma = " << gamma << ": mode " << s.mode << ", std " << s.std << '\n';
      }
      std_table.push_back(row);
    }
    summary["cells"] = cells;
    if (c.sweep) {
      const ConcentrationCheck conc = check_concentration(std_table);
      summary["concentration"] = {{"pass", conc.pass},
                                  {"inversions", conc.inversions},
                                  {"worst_increase", conc.worst_increase}};
      files.add("summary.csv", table.str());
    }
    summary["final_cell_mode_error"] = std::abs(last.mode - c.truth.s);
    files.add("summary.json", dump(summary));
    files.commit(c.out, log);
    return exit_ok;
  } catch (const NumericalError& e) {
    return report_numerical(e, log);
  }
}

int cmd_mcmc(const RunConfig& c, std::ostream& log) {
  try {
    const Mesh1D mesh = c.make_mesh();
    const Field f = analytic_source_field(c.truth.b, mesh);
    const ObservationSetup setup =
        grid_observation_setup(c.observation.m, c.observation.gamma, mesh.x_left(), mesh.x_right());
    PriorConfig prior = c.make_prior();
    if (!c.mcmc.infer_coefficient) prior.coefficient = CoefficientPrior(0, c.prior.tau, c.prior.sigma_v);

    DataVector data{setup, Eigen::VectorXd(0), c.seed};
    if (setup.size() > 0) {
      const SpectralForwardMap truth_map(assemble(mesh, c.truth_coefficient(mesh)), f, setup,
                                         c.solver.n_modes);
      data = observed_data(c, truth_map, setup);
    }
    JointForwardModel model(mesh, f, setup, prior.coefficient, c.solver.n_modes);
    McmcOptions options;
    options.n_steps = c.mcmc.n_steps;
    options.beta = c.mcmc.beta;
    options.s_step = c.mcmc.s_step;
    options.order_proposal = c.mcmc.order_proposal;
    const std::uint64_t chain_seed = c.seed ^ 0x9e3779b97f4a7c15ULL;
    const Chain chain = pcn_mcmc(data, model, prior, options, chain_seed);

    const PosteriorSummary s = posterior_summary(chain, prior, c.mcmc.burn_in);
    ordered_json summary = json_stamp(c, "mcmc");
    summary["n_steps"] = c.mcmc.n_steps;
    summary["burn_in"] = c.mcmc.burn_in;
    summary["beta"] = chain.beta;
    summary["s_step"] = chain.s_step;
    summary["acceptance_rate"] = chain.acceptance_rate;
    summary["longest_rejection_run"] = chain.longest_rejection_run;
    const int window = std::max(500, c.mcmc.n_steps / 10);
    const bool stuck = chain.longest_rejection_run >= window;
    summary["stuck_warning"] = stuck;
    summary["s"] = summary_json(s);
    if (prior.coefficient.n_kl() > 0) {
      double sum = 0.0, sum_sq = 0.0;
      const auto kept = chain.samples.size() - static_cast<std::size_t>(c.mcmc.burn_in);
      for (std::size_t i = static_cast<std::size_t>(c.mcmc.burn_in); i < chain.samples.size(); ++i) {
        sum += chain.samples[i].xi[0];
        sum_sq += chain.samples[i].xi[0] * chain.samples[i].xi[0];
      }
      const double mean = sum / static_cast<double>(kept);
      summary["xi_1"] = {{"mean", mean}, {"var", sum_sq / static_cast<double>(kept) - mean * mean}};
    }
    summary["eigendecompositions"] = model.eigendecompositions();
    if (stuck) log << "warning: " << chain.longest_rejection_run << " consecutive rejections\n";
    log << "acceptance rate " << chain.acceptance_rate << ", posterior mean of s " << s.mean << '\n';

    std::ostringstream csv;
    csv << csv_stamp(c);
    write_chain_csv(csv, chain);
    OutputSet files;
    files.add("chain.csv", csv.str());
    files.add("summary.json", dump(summary));
    files.commit(c.out, log);
    return exit_ok;
  } catch (const NumericalError& e) {
    return report_numerical(e, log);
  }
}

int cmd_verify(const RunConfig& c, std::ostream& log) {
  const std::vector<CheckResult> checks = verification_checks(c, log);
  ordered_json report = json_stamp(c, "verify");
  ordered_json list = ordered_json::array();
  bool all = true;
  for (const CheckResult& r : checks) {
    all = all && r.pass;
    ordered_json item = {{"name", r.name},
                         {"value", std::isfinite(r.value) ? ordered_json(r.value) : ordered_json(nullptr)},
                         {"relation", r.relation},
                         {"tolerance", r.bound},
                         {"pass", r.pass}};
    if (!r.note.empty()) item["note"] = r.note;
    list.push_back(item);
  }
  report["pass"] = all;
  report["checks"] = list;
  OutputSet files;
  files.add("verify.json", dump(report));
  files.commit(c.out, log);
  return all ? exit_ok : exit_verification_failed;
}

int cmd_hellinger_sweep(const RunConfig& c, std::ostream& log) {
  try {
    const Mesh1D mesh = c.make_mesh();
    const ObservationSetup setup =
        grid_observation_setup(c.observation.m, c.observation.gamma, mesh.x_left(), mesh.x_right());
    if (setup.size() == 0) throw ConfigError("config: hellinger-sweep needs observation.m >= 1");
    const SpectralForwardMap map(assemble(mesh, c.truth_coefficient(mesh)),
                                 analytic_source_field(c.truth.b, mesh), setup, c.solver.n_modes);
    const DataVector data = observed_data(c, map, setup);
    const Eigen::VectorXd direction =
        c.hellinger.direction == "data" ? data.y : Eigen::VectorXd::Ones(setup.size());
    if (direction.norm() == 0.0) throw ConfigError("config: hellinger.direction is the zero vector");
    const OrderPrior prior(c.prior.s_lo, c.prior.s_hi);
    HellingerReport r;
    try {
      r = wellposedness_sweep(
          data, c.hellinger.epsilons, direction,
          [&](const DataVector& y) { return posterior_grid_1d(y, prior, map, c.n_grid); },
          c.hellinger.radius);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("config: hellinger: ") + e.what());
    }
    ordered_json report = json_stamp(c, "hellinger-sweep");
    ordered_json points = ordered_json::array();
    std::ostringstream csv;
    csv << csv_stamp(c) << "epsilon,distance,ratio\n";
    csv.precision(17);
    for (const HellingerPoint& p : r.points) {
      points.push_back({{"epsilon", p.data_shift}, {"distance", p.distance}, {"ratio", p.ratio}});
      csv << p.data_shift << ',' << p.distance << ',' << p.ratio << '\n';
    }
    report["points"] = points;
    report["slope"] = std::isfinite(r.slope) ? ordered_json(r.slope) : ordered_json(nullptr);
    report["max_ratio"] = r.max_ratio;
    report["min_ratio"] = r.min_ratio;
    log << "slope " << r.slope << ", ratio spread " << r.max_ratio / r.min_ratio << '\n';
    OutputSet files;
    files.add("hellinger.csv", csv.str());
    files.add("hellinger.json", dump(report));
    files.commit(c.out, log);
    return exit_ok;
  } catch (const NumericalError& e) {
    return report_numerical(e, log);
  }
}

}  // namespace fracbayes::app
