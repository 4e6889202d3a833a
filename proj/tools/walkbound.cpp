// walkbound: batch front end.
//
//   walkbound <command> --config run.cfg [--seed N] [--out PATH] [--format csv|json|dot]
//             [--workers N] [--n-paths N] [--n-steps N] [--depth N] ...
//
// Exit codes: 0 ok, 2 config, 3 convergence, 4 budget, 5 truncation overflow.

#include <cstdlib>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "walkbound/cli.hpp"
#include "walkbound/config.hpp"
#include "walkbound/error.hpp"
#include "walkbound/parallel.hpp"

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<std::size_t> n_paths, n_steps, depth, margin, burn_in, horizon, n_resample, compare_depth, step_budget,
      k_max;
  std::optional<int> max_iter;
};

void apply(walkbound::RunConfig& cfg, const Overrides& o) {
  if (const char* env = std::getenv("WALKBOUND_SEED")) {
    try {
      std::size_t used = 0;
      cfg.seed = std::stoull(env, &used);
      if (env[used] != '\0') throw std::invalid_argument(env);
    } catch (const std::exception&) {
      throw walkbound::ConfigError(std::string("WALKBOUND_SEED is not an unsigned integer: ") + env);
    }
  }
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_path = *o.out;
  if (o.format) cfg.format = *o.format;
  if (o.n_paths) cfg.n_paths = *o.n_paths;
  if (o.n_steps) cfg.n_steps = *o.n_steps;
  if (o.depth) cfg.depth = *o.depth;
  if (o.margin) cfg.margin = *o.margin;
  if (o.burn_in) cfg.burn_in = *o.burn_in;
  if (o.horizon) cfg.horizon = *o.horizon;
  if (o.n_resample) cfg.n_resample = *o.n_resample;
  if (o.compare_depth) cfg.compare_depth = *o.compare_depth;
  if (o.step_budget) cfg.step_budget = *o.step_budget;
  if (o.k_max) cfg.tree_k_max = *o.k_max;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks on free-group extensions and their boundaries"};
  app.require_subcommand(1, 1);

  std::string config_path;
  int workers = 0;
  Overrides o;
  bool emit = false;

  for (const auto& name : walkbound::command_names()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "RNG seed (overrides WALKBOUND_SEED and run.seed)");
    sub->add_option("--out", o.out, "output path (stdout when absent)");
    sub->add_option("--format", o.format, "csv, json or dot")->check(CLI::IsMember({"csv", "json", "dot"}));
    sub->add_option("--workers", workers, "worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    sub->add_option("--n-paths", o.n_paths);
    sub->add_option("--n-steps", o.n_steps);
    sub->add_option("--depth", o.depth);
    sub->add_option("--margin", o.margin);
    sub->add_option("--burn-in", o.burn_in);
    sub->add_option("--horizon", o.horizon);
    sub->add_option("--n-resample", o.n_resample);
    sub->add_option("--compare-depth", o.compare_depth);
    sub->add_option("--step-budget", o.step_budget);
    sub->add_option("--k-max", o.k_max);
    sub->add_option("--max-iter", o.max_iter);
    sub->add_flag("--emit-config", emit, "print the normalized config and exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    walkbound::RunConfig cfg = walkbound::load_config(config_path);
    apply(cfg, o);
    if (emit) {
      std::cout << walkbound::emit_config(cfg);
      return 0;
    }
    walkbound::set_workers(workers);
    const std::string text = walkbound::run_command(command, cfg);
    if (cfg.output_path.empty())
      std::cout << text;
    else
      walkbound::write_atomically(cfg.output_path, text);
    return 0;
  } catch (const walkbound::Error& e) {
    std::cerr << "walkbound " << command << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "walkbound " << command << ": internal error: " << e.what() << "\n";
    return 1;
  }
}
