#include "fracbayes/app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fracbayes/error.hpp"
#include "fracbayes/serialization.hpp"
#include "json.hpp"

namespace fracbayes::app {

namespace {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string join_path(const std::string& parent, const std::string& key) {
  return parent.empty() ? key : parent + "." + key;
}

// Reads keys from one JSON object and remembers which were consumed, so that
// anything left over can be reported as unknown.
class Block {
 public:
  Block(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  template <typename T>
  void read(const std::string& key, T& target) {
    if (!node_.contains(key)) return;
    seen_.insert(key);
    try {
      target = node_.at(key).get<T>();
    } catch (const json::exception&) {
      fail(key, "has the wrong type (got " + node_.at(key).dump() + ")");
    }
  }

  Block child(const std::string& key) {
    seen_.insert(key);
    return Block(node_.at(key), join_path(path_, key));
  }

  const json& raw(const std::string& key) {
    seen_.insert(key);
    return node_.at(key);
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const std::string where = key.empty() ? path_ : join_path(path_, key);
    throw ConfigError("config: " + (where.empty() ? std::string("document") : where) + " " + what);
  }

  void check(bool ok, const std::string& key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) fail(item.key(), "is not a recognised setting");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

void parse_mesh(Block b, MeshConfig& c) {
  b.read("x_left", c.x_left);
  b.read("x_right", c.x_right);
  b.read("n_cells", c.n_cells);
  b.check(std::isfinite(c.x_left) && std::isfinite(c.x_right) && c.x_left < c.x_right, "x_right",
          "must exceed x_left");
  b.check(c.n_cells >= 2 && c.n_cells <= (1 << 20), "n_cells", "must lie in [2, 2^20]");
  b.finish();
}

void parse_solver(Block b, SolverConfig& c) {
  std::string kind = "spectral";
  b.read("kind", kind);
  if (kind == "spectral") {
    c.kind = SolverKind::spectral;
  } else if (kind == "extension") {
    c.kind = SolverKind::extension;
  } else {
    b.fail("kind", "must be \"spectral\" or \"extension\" (got \"" + kind + "\")");
  }
  if (b.has("n_modes")) {
    int k = 0;
    b.read("n_modes", k);
    b.check(k >= 1, "n_modes", "must be >= 1");
    c.n_modes = k;
  }
  b.read("extension_levels", c.extension_levels);
  b.read("y_max", c.y_max);
  b.read("grading", c.grading);
  b.check(c.extension_levels >= 2, "extension_levels", "must be >= 2");
  b.check(finite_positive(c.y_max), "y_max", "must be positive");
  b.check(std::isfinite(c.grading) && c.grading >= 1.0, "grading", "must be >= 1");
  b.finish();
}

void parse_truth(Block b, TruthConfig& c) {
  b.read("s", c.s);
  b.read("b", c.b);
  b.read("a", c.a_constant);
  b.read("xi", c.xi);
  b.check(std::isfinite(c.s) && c.s >= 0.0 && c.s <= 1.0, "s", "must lie in [0, 1]");
  b.check(finite_positive(c.b) && std::abs(c.b - std::round(c.b)) > 1e-12, "b",
          "must be positive and not an integer");
  b.check(finite_positive(c.a_constant), "a", "must be positive");
  for (double v : c.xi) b.check(std::isfinite(v), "xi", "must contain finite values");
  b.check(c.xi.empty() || c.a_constant == 1.0, "a", "cannot be combined with xi");
  b.finish();
}

void parse_prior(Block b, PriorBlock& c) {
  b.read("s_lo", c.s_lo);
  b.read("s_hi", c.s_hi);
  b.read("n_kl", c.n_kl);
  b.read("tau", c.tau);
  b.read("sigma_v", c.sigma_v);
  b.check(c.s_lo >= 0.0 && c.s_hi <= 1.0 && c.s_lo < c.s_hi, "s_hi",
          "needs 0 <= s_lo < s_hi <= 1");
  b.check(c.n_kl >= 0 && c.n_kl <= 4096, "n_kl", "must lie in [0, 4096]");
  b.check(std::isfinite(c.tau) && c.tau > 0.5, "tau", "must exceed 1/2");
  b.check(std::isfinite(c.sigma_v) && c.sigma_v >= 0.0, "sigma_v", "must be >= 0");
  b.finish();
}

void parse_observation(Block b, ObservationConfig& c, const std::filesystem::path& base_dir) {
  b.read("m", c.m);
  b.read("gamma", c.gamma);
  b.check(c.m >= 0 && c.m <= 1000000, "m", "must lie in [0, 10^6]");
  b.check(finite_positive(c.gamma), "gamma", "must be positive");
  if (b.has("data_file")) {
    std::string file;
    b.read("data_file", file);
    std::filesystem::path p(file);
    if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
    b.check(std::filesystem::is_regular_file(p), "data_file", "does not exist: " + p.string());
    c.data_file = p;
  }
  b.finish();
}

void parse_sweep(Block b, SweepConfig& c) {
  b.read("m", c.m);
  b.read("gamma", c.gamma);
  b.check(!c.m.empty(), "m", "must list at least one observation count");
  b.check(!c.gamma.empty(), "gamma", "must list at least one noise level");
  for (int m : c.m) b.check(m >= 0 && m <= 1000000, "m", "entries must lie in [0, 10^6]");
  for (double g : c.gamma) b.check(finite_positive(g), "gamma", "entries must be positive");
  b.finish();
}

void parse_mcmc(Block b, McmcConfig& c) {
  b.read("n_steps", c.n_steps);
  b.read("beta", c.beta);
  b.read("s_step", c.s_step);
  b.read("burn_in", c.burn_in);
  b.read("infer_coefficient", c.infer_coefficient);
  std::string proposal = "reflected_walk";
  b.read("order_proposal", proposal);
  if (proposal == "reflected_walk") {
    c.order_proposal = OrderProposal::reflected_walk;
  } else if (proposal == "independent") {
    c.order_proposal = OrderProposal::independent;
  } else {
    b.fail("order_proposal", "must be \"reflected_walk\" or \"independent\"");
  }
  b.check(c.n_steps >= 1, "n_steps", "must be >= 1");
  b.check(c.beta > 0.0 && c.beta <= 1.0, "beta", "must lie in (0, 1]");
  b.check(finite_positive(c.s_step), "s_step", "must be positive");
  b.check(c.burn_in >= 0 && c.burn_in < c.n_steps, "burn_in", "must lie in [0, n_steps)");
  b.finish();
}

void parse_hellinger(Block b, HellingerConfig& c) {
  b.read("epsilons", c.epsilons);
  b.read("direction", c.direction);
  if (b.has("radius")) {
    double r = 0.0;
    b.read("radius", r);
    b.check(finite_positive(r), "radius", "must be positive");
    c.radius = r;
  }
  b.check(!c.epsilons.empty(), "epsilons", "must not be empty");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i) {
    b.check(std::isfinite(c.epsilons[i]) && c.epsilons[i] >= 0.0, "epsilons", "must be >= 0");
    if (i > 0) b.check(c.epsilons[i] < c.epsilons[i - 1], "epsilons", "must be decreasing");
  }
  b.check(c.direction == "ones" || c.direction == "data", "direction",
          "must be \"ones\" or \"data\"");
  b.finish();
}

void parse_verify(Block b, VerifyConfig& c) {
  b.read("trials", c.trials);
  b.read("perturbation", c.perturbation);
  b.read("eigen_perturbation", c.eigen_perturbation);
  b.read("eigen_pairs", c.eigen_pairs);
  b.read("extension_cells", c.extension_cells);
  b.read("extension_levels", c.extension_levels);
  b.read("holder_trials", c.holder_trials);
  b.read("holder_constant", c.holder_constant);
  b.read("corrupt_stiffness", c.corrupt_stiffness);
  b.check(c.trials >= 1, "trials", "must be >= 1");
  b.check(c.perturbation > 0.0 && c.perturbation < 1.0, "perturbation", "must lie in (0, 1)");
  b.check(c.eigen_perturbation > 0.0 && c.eigen_perturbation < 1.0, "eigen_perturbation",
          "must lie in (0, 1)");
  b.check(c.eigen_pairs >= 1 && c.eigen_pairs <= 32, "eigen_pairs", "must lie in [1, 32]");
  b.check(c.extension_cells >= 8, "extension_cells", "must be >= 8");
  b.check(c.extension_levels >= 2, "extension_levels", "must be >= 2");
  b.check(c.holder_trials >= 1, "holder_trials", "must be >= 1");
  b.check(finite_positive(c.holder_constant), "holder_constant", "must be positive");
  b.finish();
}

std::string proposal_name(OrderProposal p) {
  return p == OrderProposal::independent ? "independent" : "reflected_walk";
}

}  // namespace

Mesh1D RunConfig::make_mesh() const { return Mesh1D(mesh.x_left, mesh.x_right, mesh.n_cells); }

PriorConfig RunConfig::make_prior() const {
  return PriorConfig{OrderPrior(prior.s_lo, prior.s_hi),
                     CoefficientPrior(prior.n_kl, prior.tau, prior.sigma_v)};
}

Coefficient RunConfig::truth_coefficient(const Mesh1D& m) const {
  if (truth.xi.empty()) return Coefficient::constant(m.n_cells(), truth.a_constant);
  const CoefficientPrior kl(static_cast<int>(truth.xi.size()), prior.tau, prior.sigma_v);
  return realize_coefficient(kl, truth.xi, m);
}

ForwardOptions RunConfig::forward_options() const {
  ForwardOptions o;
  o.n_modes = solver.n_modes;
  o.extension_levels = solver.extension_levels;
  o.extension_y_max = solver.y_max;
  o.extension_grading = solver.grading;
  return o;
}

RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte offset; translate it to a line for the user.
    const std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n');
    throw ConfigError("config: line " + std::to_string(line) + ": " + e.what());
  }
  RunConfig c;
  Block root(doc, "");
  if (root.has("mesh")) parse_mesh(root.child("mesh"), c.mesh);
  if (root.has("solver")) parse_solver(root.child("solver"), c.solver);
  if (root.has("truth")) parse_truth(root.child("truth"), c.truth);
  if (root.has("prior")) parse_prior(root.child("prior"), c.prior);
  if (root.has("observation")) parse_observation(root.child("observation"), c.observation, base_dir);
  root.read("n_grid", c.n_grid);
  root.check(c.n_grid >= 51 && c.n_grid <= 1000001, "n_grid", "must lie in [51, 10^6]");
  if (root.has("sweep")) {
    SweepConfig sweep;
    parse_sweep(root.child("sweep"), sweep);
    c.sweep = sweep;
  }
  if (root.has("mcmc")) parse_mcmc(root.child("mcmc"), c.mcmc);
  if (root.has("hellinger")) parse_hellinger(root.child("hellinger"), c.hellinger);
  if (root.has("verify")) parse_verify(root.child("verify"), c.verify);
  root.read("seed", c.seed);
  if (root.has("out")) {
    std::string out;
    root.read("out", out);
    c.out = out;
  }
  root.finish();

  // Cross-block consistency.
  const int n_nodes = c.mesh.n_cells + 1;
  if (c.solver.n_modes && *c.solver.n_modes > n_nodes - 1) {
    throw ConfigError("config: solver.n_modes must not exceed n_cells (" +
                      std::to_string(c.mesh.n_cells) + ")");
  }
  if (c.truth.s < c.prior.s_lo || c.truth.s > c.prior.s_hi) {
    throw ConfigError("config: truth.s lies outside the prior support");
  }
  if (c.solver.kind == SolverKind::extension && (c.truth.s <= 0.0 || c.truth.s >= 1.0)) {
    throw ConfigError("config: the extension solver needs truth.s in (0, 1)");
  }
  if (!c.mcmc.infer_coefficient && (!c.truth.xi.empty() || c.truth.a_constant != 1.0)) {
    throw ConfigError("config: mcmc.infer_coefficient = false requires a unit truth coefficient");
  }
  if (c.sweep && c.observation.data_file) {
    throw ConfigError("config: sweep cannot be combined with observation.data_file");
  }
  if (c.verify.extension_cells > c.mesh.n_cells * 16) {
    throw ConfigError("config: verify.extension_cells is implausibly large");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path.parent_path());
}

std::string canonical_json(const RunConfig& c) {
  ordered_json j;
  j["mesh"] = {{"x_left", c.mesh.x_left}, {"x_right", c.mesh.x_right}, {"n_cells", c.mesh.n_cells}};
  j["solver"] = {{"kind", c.solver.kind == SolverKind::spectral ? "spectral" : "extension"},
                 {"n_modes", c.solver.n_modes ? json(*c.solver.n_modes) : json(nullptr)},
                 {"extension_levels", c.solver.extension_levels},
                 {"y_max", c.solver.y_max},
                 {"grading", c.solver.grading}};
  j["truth"] = {{"s", c.truth.s}, {"b", c.truth.b}, {"a", c.truth.a_constant}, {"xi", c.truth.xi}};
  j["prior"] = {{"s_lo", c.prior.s_lo},
                {"s_hi", c.prior.s_hi},
                {"n_kl", c.prior.n_kl},
                {"tau", c.prior.tau},
                {"sigma_v", c.prior.sigma_v}};
  j["observation"] = {{"m", c.observation.m},
                      {"gamma", c.observation.gamma},
                      {"data_file", c.observation.data_file
                                        ? json(c.observation.data_file->generic_string())
                                        : json(nullptr)}};
  j["n_grid"] = c.n_grid;
  if (c.sweep) j["sweep"] = {{"m", c.sweep->m}, {"gamma", c.sweep->gamma}};
  j["mcmc"] = {{"n_steps", c.mcmc.n_steps},
               {"beta", c.mcmc.beta},
               {"s_step", c.mcmc.s_step},
               {"order_proposal", proposal_name(c.mcmc.order_proposal)},
               {"burn_in", c.mcmc.burn_in},
               {"infer_coefficient", c.mcmc.infer_coefficient}};
  j["hellinger"] = {{"epsilons", c.hellinger.epsilons},
                    {"direction", c.hellinger.direction},
                    {"radius", c.hellinger.radius ? json(*c.hellinger.radius) : json(nullptr)}};
  j["verify"] = {{"trials", c.verify.trials},
                 {"perturbation", c.verify.perturbation},
                 {"eigen_perturbation", c.verify.eigen_perturbation},
                 {"eigen_pairs", c.verify.eigen_pairs},
                 {"extension_cells", c.verify.extension_cells},
                 {"extension_levels", c.verify.extension_levels},
                 {"holder_trials", c.verify.holder_trials},
                 {"holder_constant", c.verify.holder_constant},
                 {"corrupt_stiffness", c.verify.corrupt_stiffness}};
  return j.dump();
}

std::string config_hash(const RunConfig& config) { return hex64(fnv1a64(canonical_json(config))); }

}  // namespace fracbayes::app
