#ifndef EDGECACHE_SPO_STUDY_HPP
#define EDGECACHE_SPO_STUDY_HPP

#include <cstdint>
#include <vector>

#include "edgecache/catalog.hpp"
#include "edgecache/random.hpp"
#include "edgecache/spo.hpp"

namespace edgecache {

/// Random placement instances over the parameter ranges of the simulation
/// studies: F on a grid, cache size as a fraction of total content size,
/// gamma uniform on [0, gamma_max].
struct SpoStudyOptions {
  int min_files = 50;
  int max_files = 1000;
  int files_step = 50;
  std::vector<double> cache_fractions{0.01, 0.025, 0.05, 0.10, 0.20};
  double gamma_max = 2.4;
  std::vector<int> sizes{1, 3, 5, 7, 9};
  SizeAssignment assignment = SizeAssignment::kRoundRobin;
};

struct SpoStudyCase {
  Catalog catalog;
  double gamma = 0.0;
  SpoInstance instance;
};

/// Capacity is max(s_1, round(fraction * total size)).
SpoStudyCase draw_spo_case(Rng& rng, const SpoStudyOptions& options = {});

struct SpoStudyRecord {
  int num_files = 0;
  std::int64_t capacity = 0;
  double gamma = 0.0;
  double greedy_value = 0.0;
  double greedy_skip_value = 0.0;
  double bnb_value = 0.0;
  SpoStatus bnb_status = SpoStatus::kOptimal;
  std::int64_t bnb_nodes = 0;
  double delta_bound = 0.0;  // Zipf bound on optimum / greedy
  double greedy_seconds = 0.0;
  double bnb_seconds = 0.0;
};

std::vector<SpoStudyRecord> run_spo_study(std::int64_t instances, Seconds timeout,
                                          std::uint64_t seed,
                                          const SpoStudyOptions& options = {});

struct SpoStudySummary {
  std::int64_t instances = 0;
  double mean_ratio = 0.0;       // greedy / bnb
  double ratio_stderr = 0.0;
  double min_ratio = 1.0;
  double mean_skip_ratio = 0.0;  // skip-and-continue greedy / bnb
  double optimal_fraction = 0.0;
  std::int64_t delta_violations = 0;  // bnb / greedy > delta_bound + 1e-9
  double median_greedy_seconds = 0.0;
  double median_bnb_seconds = 0.0;
  double median_speedup = 0.0;        // median bnb time / median greedy time
};

SpoStudySummary summarize_spo_study(const std::vector<SpoStudyRecord>& records);

}  // namespace edgecache

#endif  // EDGECACHE_SPO_STUDY_HPP
