#include "edgecache/spo_study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "edgecache/engine.hpp"

namespace edgecache {

SpoStudyCase draw_spo_case(Rng& rng, const SpoStudyOptions& options) {
  const int steps = (options.max_files - options.min_files) / options.files_step + 1;
  const int num_files =
      options.min_files + options.files_step * static_cast<int>(rng.below(static_cast<std::uint64_t>(steps)));

  const auto k = static_cast<int>(options.sizes.size());
  std::vector<SizeClass> classes;
  for (int i = 0; i < k; ++i) {
    classes.push_back({options.sizes[static_cast<std::size_t>(i)],
                       num_files / k + (i < num_files % k ? 1 : 0)});
  }
  std::erase_if(classes, [](const SizeClass& c) { return c.count == 0; });
  Catalog catalog = build_catalog(classes, options.assignment, rng.next());

  const double fraction = options.cache_fractions[rng.below(options.cache_fractions.size())];
  const double gamma = options.gamma_max * rng.uniform();
  const std::int64_t capacity =
      std::max<std::int64_t>(catalog.largest_size(),
                             std::llround(fraction * static_cast<double>(catalog.total_size())));
  const PopularityProfile profile = zipf_profile(num_files, gamma, 100);
  SpoInstance instance = make_instance(catalog, profile, capacity);
  return {std::move(catalog), gamma, std::move(instance)};
}

std::vector<SpoStudyRecord> run_spo_study(std::int64_t instances, Seconds timeout,
                                          std::uint64_t seed, const SpoStudyOptions& options) {
  using Clock = std::chrono::steady_clock;
  std::vector<SpoStudyRecord> out;
  out.reserve(static_cast<std::size_t>(std::max<std::int64_t>(instances, 0)));
  for (std::int64_t i = 0; i < instances; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
    const SpoStudyCase c = draw_spo_case(rng, options);

    SpoStudyRecord r;
    r.num_files = c.catalog.num_files();
    r.capacity = c.instance.capacity;
    r.gamma = c.gamma;

    const auto t0 = Clock::now();
    const SpoSolution greedy = solve_greedy(c.instance);
    const auto t1 = Clock::now();
    const SpoSolution bnb = solve_bnb(c.instance, timeout);
    const auto t2 = Clock::now();

    r.greedy_value = greedy.value;
    r.greedy_skip_value = solve_greedy(c.instance, GreedyVariant::kSkipAndContinue).value;
    r.bnb_value = bnb.value;
    r.bnb_status = bnb.status;
    r.bnb_nodes = bnb.nodes;
    r.delta_bound = delta_bound(c.catalog, c.instance.capacity, c.gamma);
    r.greedy_seconds = std::chrono::duration<double>(t1 - t0).count();
    r.bnb_seconds = std::chrono::duration<double>(t2 - t1).count();
    out.push_back(r);
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) {
    m = (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid))) / 2.0;
  }
  return m;
}

}  // namespace

SpoStudySummary summarize_spo_study(const std::vector<SpoStudyRecord>& records) {
  SpoStudySummary s;
  s.instances = static_cast<std::int64_t>(records.size());
  if (records.empty()) return s;
  std::vector<double> ratios, skip, tg, tb;
  std::int64_t optimal = 0;
  for (const auto& r : records) {
    const double ratio = r.bnb_value > 0.0 ? r.greedy_value / r.bnb_value : 1.0;
    ratios.push_back(ratio);
    skip.push_back(r.bnb_value > 0.0 ? r.greedy_skip_value / r.bnb_value : 1.0);
    s.min_ratio = std::min(s.min_ratio, ratio);
    if (r.bnb_status == SpoStatus::kOptimal) ++optimal;
    if (r.greedy_value > 0.0 && r.bnb_value / r.greedy_value > r.delta_bound + 1e-9) {
      ++s.delta_violations;
    }
    tg.push_back(r.greedy_seconds);
    tb.push_back(r.bnb_seconds);
  }
  const MeanStderr m = mean_stderr(ratios);
  s.mean_ratio = m.mean;
  s.ratio_stderr = m.stderr_;
  s.mean_skip_ratio = mean_stderr(skip).mean;
  s.optimal_fraction = static_cast<double>(optimal) / static_cast<double>(records.size());
  s.median_greedy_seconds = median(tg);
  s.median_bnb_seconds = median(tb);
  s.median_speedup = s.median_greedy_seconds > 0.0 ? s.median_bnb_seconds / s.median_greedy_seconds : 0.0;
  return s;
}

}  // namespace edgecache
