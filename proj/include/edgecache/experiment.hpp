#ifndef EDGECACHE_EXPERIMENT_HPP
#define EDGECACHE_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "edgecache/catalog.hpp"
#include "edgecache/engine.hpp"
#include "edgecache/policies.hpp"

namespace edgecache {

enum class SweepAxis { kNone, kGamma, kCacheSize, kUsers, kFiles };
enum class ExperimentMode { kSimulation, kSpoValidation };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);
std::string_view to_string(ExperimentMode mode);
ExperimentMode parse_experiment_mode(std::string_view name);

struct PolicySpec {
  std::string name;  // label used in output files
  PolicyKind kind;

  bool operator==(const PolicySpec&) const = default;
};

/// Everything needed to reproduce one experiment. The defaults are the
/// reference system: sizes {1,3,5,7,9} with 200 files each, U = 100,
/// gamma = 0.56, M = 256, eps = 0.07.
struct ExperimentConfig {
  std::string name = "custom";
  ExperimentMode mode = ExperimentMode::kSimulation;

  std::vector<SizeClass> size_classes{{1, 200}, {3, 200}, {5, 200}, {7, 200}, {9, 200}};
  SizeAssignment size_assignment = SizeAssignment::kRoundRobin;
  std::uint64_t catalog_seed = 0;
  double gamma = 0.56;
  int users = 100;
  std::int64_t cache_size = 256;
  // Files sweep: cache size at each point is this fraction of total size.
  double cache_fraction = 0.05;

  std::int64_t horizon = 3000;
  std::int64_t burn_in = kDefaultBurnIn;
  std::vector<std::int64_t> checkpoints;  // empty means {horizon}
  std::vector<PolicySpec> policies;

  std::int64_t replications = 20000;
  double scale = 1.0;  // multiplies replications, never the horizon
  std::uint64_t seed = 1;
  int parallelism = 0;  // 0: one thread per hardware core
  double oracle_timeout = 50.0;  // seconds

  SweepAxis sweep_axis = SweepAxis::kNone;
  std::vector<double> sweep_values;

  bool trace = false;
  bool plot = true;
  std::string output_dir = "out";

  std::int64_t spo_instances = 20000;
  double spo_timeout = 50.0;  // seconds

  bool operator==(const ExperimentConfig&) const = default;

  int num_files() const;
  std::int64_t effective_replications() const;
  std::int64_t effective_spo_instances() const;
};

/// Throws std::invalid_argument describing the first problem found:
/// no policies, non-positive sizes or counts, M below the largest file for a
/// learning policy, burn-in not shorter than the horizon, bad sweep values.
void validate(const ExperimentConfig& config);

inline constexpr std::string_view kPresetNames[] = {
    "fig1_convergence", "fig2_cucb_small", "fig3_gamma", "fig4_cache",
    "fig5_users",       "fig6_files",      "spo_validation"};

/// Throws std::invalid_argument for an unknown name.
ExperimentConfig preset(std::string_view name);

// Key-value config file, one [experiment] section, optional [sweep] and
// [spo_validation] sections, and one [policy.<name>] section per policy in
// run order.
std::string to_config_text(const ExperimentConfig& config);
ExperimentConfig parse_config_text(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the config text.
std::uint64_t fingerprint(const ExperimentConfig& config);

/// One resolved point of a sweep.
struct SweepPoint {
  double value = 0.0;  // sweep value; 0 when there is no sweep
  int num_files = 0;
  double gamma = 0.0;
  int users = 0;
  std::int64_t cache_size = 0;
  std::vector<SizeClass> size_classes;
};

std::vector<SweepPoint> sweep_points(const ExperimentConfig& config);

Scenario make_scenario(const ExperimentConfig& config, const SweepPoint& point);

struct ResultRow {
  std::string sweep_value;  // "-" without a sweep
  std::string policy;
  std::string metric;  // hit_rate_pct, regret, acc_reward, or an SPO study metric
  std::int64_t checkpoint = 0;
  double mean = 0.0;
  double stderr_ = 0.0;
  std::int64_t replications = 0;
  std::uint64_t seed = 0;
};

inline constexpr std::string_view kResultsHeader =
    "sweep_value,policy,metric,checkpoint,mean,stderr,replications,seed";

void write_results_csv(std::ostream& out, const std::vector<ResultRow>& rows);
std::vector<ResultRow> read_results_csv(std::istream& in);

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Self-contained SVG line chart.
void write_svg_chart(std::ostream& out, const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series);

/// Per-policy outcome of a simulation point.
struct PolicyOutcome {
  std::string policy;
  AggregateResult result;
};

struct PointOutcome {
  SweepPoint point;
  OracleReference oracle;
  std::vector<PolicyOutcome> policies;
};

/// Runs every sweep point and policy; no file output.
std::vector<PointOutcome> simulate(const ExperimentConfig& config);

/// Rows for results.csv from simulation outcomes.
std::vector<ResultRow> result_rows(const ExperimentConfig& config,
                                   const std::vector<PointOutcome>& outcomes);

/// Validates, runs, and writes into config.output_dir: results.csv,
/// config.echo, trace_<policy>.csv when tracing a run without sweep,
/// plot_<name>.svg when plotting, and timing.csv for SPO validation.
/// Nothing is written if validation fails. Returns the rows written.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

/// `solve` subcommand: parse value,weight rows (an optional header line is
/// skipped) and solve with `solver` (greedy, greedy_skip, bnb, bruteforce).
/// Throws std::invalid_argument on malformed rows or negative weights.
SpoInstance read_instance_csv(std::istream& in, std::int64_t capacity);
SpoSolution solve_with(const SpoInstance& inst, std::string_view solver, Seconds timeout);
void print_solution(std::ostream& out, const SpoSolution& solution);

}  // namespace edgecache

#endif  // EDGECACHE_EXPERIMENT_HPP
