#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fracbayes/bayes.hpp"
#include "fracbayes/forward.hpp"
#include "fracbayes/priors.hpp"

namespace fracbayes::app {

struct MeshConfig {
  double x_left = -3.141592653589793;
  double x_right = 3.141592653589793;
  int n_cells = 1024;
};

struct SolverConfig {
  SolverKind kind = SolverKind::spectral;
  std::optional<int> n_modes;
  int extension_levels = 128;
  double y_max = 8.0;
  double grading = 3.0;
};

/// The data-generating parameter. The coefficient is either the constant
/// `a_constant` or, when `xi` is non-empty, exp(-v(xi)) under the prior's KL basis.
struct TruthConfig {
  double s = 0.7;
  double b = 0.5;
  double a_constant = 1.0;
  std::vector<double> xi;
};

struct PriorBlock {
  double s_lo = 0.0;
  double s_hi = 1.0;
  int n_kl = 16;
  double tau = 2.0;
  double sigma_v = 0.5;
};

struct ObservationConfig {
  int m = 100;
  double gamma = 0.075;
  std::optional<std::filesystem::path> data_file;
};

struct SweepConfig {
  std::vector<int> m;
  std::vector<double> gamma;
};

struct McmcConfig {
  int n_steps = 10000;
  double beta = 0.2;
  double s_step = 0.05;
  OrderProposal order_proposal = OrderProposal::reflected_walk;
  int burn_in = 1000;
  bool infer_coefficient = true;
};

struct HellingerConfig {
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3};
  std::string direction = "ones";  // "ones" or "data"
  std::optional<double> radius;
};

struct VerifyConfig {
  int trials = 5;
  double perturbation = 0.1;
  double eigen_perturbation = 1e-3;
  int eigen_pairs = 5;
  int extension_cells = 256;
  int extension_levels = 128;
  int holder_trials = 20;
  double holder_constant = 4.0;
  bool corrupt_stiffness = false;
};

struct RunConfig {
  MeshConfig mesh;
  SolverConfig solver;
  TruthConfig truth;
  PriorBlock prior;
  ObservationConfig observation;
  int n_grid = 401;
  std::optional<SweepConfig> sweep;
  McmcConfig mcmc;
  HellingerConfig hellinger;
  VerifyConfig verify;
  std::uint64_t seed = 20240601;
  std::filesystem::path out = "out";

  Mesh1D make_mesh() const;
  PriorConfig make_prior() const;
  Coefficient truth_coefficient(const Mesh1D& mesh) const;
  ForwardOptions forward_options() const;
};

/// Parses and validates a JSON config. Unknown keys and out-of-range values
/// throw ConfigError naming the offending key. Relative data paths resolve
/// against `base_dir`.
RunConfig parse_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Canonical JSON of every resolved setting except the seed and output directory.
std::string canonical_json(const RunConfig& config);
std::string config_hash(const RunConfig& config);

}  // namespace fracbayes::app
