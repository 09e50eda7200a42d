// edgecache: run cache-placement experiments and solve placement instances.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "edgecache/experiment.hpp"

using namespace edgecache;

namespace {

struct RunFlags {
  std::string preset_name;
  std::string config_path;
  double scale = 0.0;
  long long seed = -1;
  std::string out;
  int jobs = 0;
  bool no_plot = false;
  bool trace = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  auto* p = cmd->add_option("--preset", f.preset_name, "named experiment preset");
  auto* c = cmd->add_option("--config", f.config_path, "experiment config file")->check(CLI::ExistingFile);
  p->excludes(c);
  cmd->add_option("--scale", f.scale, "multiplier on the replication count")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "master seed")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", f.out, "output directory (default $EDGECACHE_OUT_DIR or the config's)");
  cmd->add_option("-j,--jobs", f.jobs, "parallel episodes (default: all cores)")->check(CLI::PositiveNumber);
  cmd->add_flag("--no-plot", f.no_plot, "skip the SVG chart");
  cmd->add_flag("--trace", f.trace, "write per-period trace_<policy>.csv files");
}

ExperimentConfig resolve(const RunFlags& f) {
  ExperimentConfig c;
  if (!f.config_path.empty()) {
    c = load_config(f.config_path);
  } else if (!f.preset_name.empty()) {
    c = preset(f.preset_name);
  } else {
    throw std::invalid_argument("give --preset or --config");
  }
  if (f.scale > 0.0) c.scale = f.scale;
  if (f.seed >= 0) c.seed = static_cast<std::uint64_t>(f.seed);
  if (f.jobs > 0) c.parallelism = f.jobs;
  if (f.no_plot) c.plot = false;
  if (f.trace) c.trace = true;
  if (!f.out.empty()) {
    c.output_dir = f.out;
  } else if (const char* env = std::getenv("EDGECACHE_OUT_DIR"); env && *env) {
    c.output_dir = std::string(env) + "/" + c.name;
  }
  return c;
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    std::size_t used = 0;
    const double v = std::stod(item, &used);
    if (used != item.size()) throw std::invalid_argument("bad grid value '" + item + "'");
    out.push_back(v);
  }
  return out;
}

int run(const ExperimentConfig& c) {
  const auto rows = run_experiment(c);
  std::cout << "wrote " << rows.size() << " rows to " << (std::filesystem::path(c.output_dir) / "results.csv").string()
            << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Edge cache placement simulator"};
  app.require_subcommand(1);

  RunFlags sim_flags;
  auto* simulate = app.add_subcommand("simulate", "run a preset or config file");
  add_run_flags(simulate, sim_flags);

  RunFlags sweep_flags;
  std::string axis, grid;
  auto* sweep = app.add_subcommand("sweep", "run with an explicit sweep axis and grid");
  add_run_flags(sweep, sweep_flags);
  sweep->add_option("--axis", axis, "gamma, cache_size (percent), users or files")->required();
  sweep->add_option("--grid", grid, "comma-separated values")->required();

  std::string instance_path, solver = "bnb";
  long long capacity = 0;
  double timeout = 50.0;
  auto* solve = app.add_subcommand("solve", "solve a value,weight CSV instance");
  solve->add_option("file", instance_path, "instance CSV ('-' for stdin)")->required();
  solve->add_option("-M,--capacity", capacity, "cache capacity")->required();
  solve->add_option("--solver", solver, "greedy, greedy_skip, bnb or bruteforce")
      ->check(CLI::IsMember({"greedy", "greedy_skip", "bnb", "bruteforce"}));
  solve->add_option("--timeout", timeout, "branch-and-bound time limit in seconds")
      ->check(CLI::PositiveNumber);

  long long instances = 2000;
  double spo_timeout = 50.0;
  long long spo_seed = 1;
  std::string spo_out;
  auto* validate_spo = app.add_subcommand("validate-spo", "greedy vs branch and bound on random instances");
  validate_spo->add_option("--instances", instances, "number of instances")->check(CLI::PositiveNumber);
  validate_spo->add_option("--timeout", spo_timeout, "per-instance time limit in seconds")
      ->check(CLI::PositiveNumber);
  validate_spo->add_option("--seed", spo_seed, "master seed")->check(CLI::NonNegativeNumber);
  validate_spo->add_option("--out", spo_out, "output directory");

  std::string preset_name;
  auto* show = app.add_subcommand("preset", "print a preset as a config file");
  show->add_option("name", preset_name)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*simulate) return run(resolve(sim_flags));
    if (*sweep) {
      ExperimentConfig c = resolve(sweep_flags);
      c.sweep_axis = parse_sweep_axis(axis);
      c.sweep_values = parse_grid(grid);
      return run(c);
    }
    if (*solve) {
      SpoInstance inst;
      if (instance_path == "-") {
        inst = read_instance_csv(std::cin, capacity);
      } else {
        std::ifstream in(instance_path);
        if (!in) throw std::runtime_error("cannot read " + instance_path);
        inst = read_instance_csv(in, capacity);
      }
      print_solution(std::cout, solve_with(inst, solver, Seconds(timeout)));
      return 0;
    }
    if (*validate_spo) {
      ExperimentConfig c = preset("spo_validation");
      c.spo_instances = instances;
      c.spo_timeout = spo_timeout;
      c.seed = static_cast<std::uint64_t>(spo_seed);
      if (!spo_out.empty()) {
        c.output_dir = spo_out;
      } else if (const char* env = std::getenv("EDGECACHE_OUT_DIR"); env && *env) {
        c.output_dir = std::string(env) + "/" + c.name;
      }
      const auto rows = run_experiment(c);
      for (const auto& r : rows) {
        std::cout << r.policy << ' ' << r.metric << ' ' << r.mean << " (stderr " << r.stderr_ << ")\n";
      }
      std::ifstream timing(std::filesystem::path(c.output_dir) / "timing.csv");
      std::cout << timing.rdbuf();
      return 0;
    }
    if (*show) {
      std::cout << to_config_text(preset(preset_name));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "edgecache: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
