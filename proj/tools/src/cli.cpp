#include <exception>
#include <ostream>

#include "CLI11.hpp"
#include "fracbayes/app/commands.hpp"
#include "fracbayes/error.hpp"

namespace fracbayes::app {

namespace {

struct Flags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& about, Flags& flags) {
  CLI::App* sub = app.add_subcommand(name, about);
  sub->add_option("--config", flags.config, "JSON run configuration")->required();
  sub->add_option("--seed", flags.seed, "overrides the config seed");
  sub->add_option("--out", flags.out, "output directory (overrides the config)");
  return sub;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian inference for fractional Neumann problems"};
  app.require_subcommand(1);
  Flags flags;
  const std::pair<const char*, int (*)(const RunConfig&, std::ostream&)> commands[] = {
      {"synth", cmd_synth},
      {"posterior-grid", cmd_posterior_grid},
      {"mcmc", cmd_mcmc},
      {"verify", cmd_verify},
      {"hellinger-sweep", cmd_hellinger_sweep},
  };
  const char* about[] = {
      "generate synthetic observations",
      "posterior of the order on a grid (optionally a sweep)",
      "joint pCN sampling of order and coefficient",
      "run the numerical verification suite",
      "Hellinger stability under data perturbations",
  };
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < std::size(commands); ++i) {
    subs.push_back(add_command(app, commands[i].first, about[i], flags));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_config_error;
  }

  try {
    RunConfig config = load_config(flags.config);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.out) config.out = *flags.out;
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (subs[i]->parsed()) return commands[i].second(config, out);
    }
    return exit_config_error;
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return exit_config_error;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return exit_numerical_error;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return exit_config_error;
  }
}

}  // namespace fracbayes::app
