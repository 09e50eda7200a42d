#include "edgecache/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <thread>

namespace edgecache {

EpisodeTrace run_episode(const PolicyKind& kind, const Catalog& catalog,
                         const PopularityProfile& profile, std::int64_t capacity,
                         std::int64_t horizon, std::uint64_t seed,
                         const EpisodeOptions& options) {
  if (horizon < 1) throw std::invalid_argument("run_episode: horizon must be >= 1");
  if (profile.num_files() != catalog.num_files()) {
    throw std::invalid_argument("run_episode: profile and catalog sizes differ");
  }

  PolicyKind resolved = kind;
  if (resolved.type == PolicyType::kMcucb && !resolved.gamma_hat && !resolved.fit_gamma) {
    resolved.gamma_hat = profile.gamma;
  }
  const PopularityProfile* truth = resolved.type == PolicyType::kIub ? &profile : nullptr;
  CachePolicy policy(resolved, catalog, capacity, truth, profile.users, options.iub_cache);

  PolicyState state = options.prior ? PolicyState::with_prior(*options.prior)
                                    : PolicyState(catalog.num_files());
  if (state.reward_mean.size() != static_cast<std::size_t>(catalog.num_files())) {
    throw std::invalid_argument("run_episode: prior has the wrong length");
  }

  Rng demand_rng(derive_seed(seed, 0));
  Rng policy_rng(derive_seed(seed, 1));
  DemandVector demands;

  EpisodeTrace trace;
  trace.horizon = horizon;
  trace.periods.resize(static_cast<std::size_t>(horizon));
  trace.acc_expected.resize(static_cast<std::size_t>(horizon));

  double acc = 0.0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    std::vector<int> cache = policy.select(state, policy_rng);
    sample_demands(profile, demand_rng, demands);

    PeriodRecord& rec = trace.periods[static_cast<std::size_t>(t)];
    for (int f : cache) {
      const auto k = static_cast<std::size_t>(f);
      rec.realized += static_cast<std::int64_t>(demands.counts[k]) * catalog.size(f);
      rec.expected += profile.theta[k] * catalog.size(f);
    }
    for (int f = 0; f < catalog.num_files(); ++f) {
      rec.demanded += static_cast<std::int64_t>(demands.counts[static_cast<std::size_t>(f)]) *
                      catalog.size(f);
    }
    acc += rec.expected;
    trace.acc_expected[static_cast<std::size_t>(t)] = acc;

    observe(state, cache, demands, catalog);
    if (options.record_caches) rec.cache = std::move(cache);
  }
  return trace;
}

RegretSeries regret_of(const EpisodeTrace& trace, double oracle_per_period) {
  RegretSeries r;
  r.oracle_per_period = oracle_per_period;
  r.regret.resize(trace.acc_expected.size());
  for (std::size_t i = 0; i < r.regret.size(); ++i) {
    r.regret[i] = static_cast<double>(i + 1) * oracle_per_period - trace.acc_expected[i];
  }
  return r;
}

double hit_rate(const EpisodeTrace& trace, std::int64_t burn_in) {
  if (burn_in < 0 || burn_in >= trace.horizon) {
    throw std::invalid_argument("hit_rate: burn-in must lie in [0, horizon)");
  }
  std::int64_t served = 0;
  std::int64_t requested = 0;
  for (auto i = static_cast<std::size_t>(burn_in); i < trace.periods.size(); ++i) {
    served += trace.periods[i].realized;
    requested += trace.periods[i].demanded;
  }
  if (requested == 0) throw std::invalid_argument("hit_rate: no requests after burn-in");
  return 100.0 * static_cast<double>(served) / static_cast<double>(requested);
}

OracleReference oracle_reference(const Catalog& catalog, const PopularityProfile& profile,
                                 std::int64_t capacity, Seconds timeout) {
  const SpoInstance inst = make_instance(catalog, profile, capacity);
  SpoSolution best = solve_bnb(inst, timeout);
  if (best.status != SpoStatus::kOptimal) {
    SpoSolution greedy = solve_greedy(inst);
    if (greedy.value > best.value) best = std::move(greedy);
    best.status = SpoStatus::kTimeoutIncumbent;
  }
  return {best.value, best.status, best.selected()};
}

MeanStderr mean_stderr(const std::vector<double>& samples) {
  MeanStderr out;
  if (samples.empty()) return out;
  const auto n = static_cast<double>(samples.size());
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

namespace {

struct EpisodeSummary {
  double hit_rate = 0.0;
  std::vector<double> expected;
  std::vector<double> realized;
  std::vector<double> demanded;
  std::vector<double> acc_at_checkpoints;
};

EpisodeSummary summarize(const Scenario& sc, const PolicyKind& kind, std::uint64_t seed,
                         const std::vector<int>* iub_cache) {
  EpisodeOptions opts;
  opts.record_caches = false;
  opts.iub_cache = iub_cache;
  const EpisodeTrace trace =
      run_episode(kind, sc.catalog, sc.profile, sc.capacity, sc.horizon, seed, opts);
  EpisodeSummary s;
  s.hit_rate = hit_rate(trace, sc.burn_in);
  const auto n = trace.periods.size();
  s.expected.resize(n);
  s.realized.resize(n);
  s.demanded.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    s.expected[i] = trace.periods[i].expected;
    s.realized[i] = static_cast<double>(trace.periods[i].realized);
    s.demanded[i] = static_cast<double>(trace.periods[i].demanded);
  }
  for (std::int64_t c : sc.checkpoints) {
    s.acc_at_checkpoints.push_back(trace.acc_expected[static_cast<std::size_t>(c - 1)]);
  }
  return s;
}

}  // namespace

AggregateResult run_replications(const Scenario& scenario, const PolicyKind& kind,
                                 double oracle_per_period, std::int64_t replications,
                                 std::uint64_t master_seed, int parallelism) {
  if (replications < 1) throw std::invalid_argument("run_replications: R must be >= 1");
  if (scenario.burn_in >= scenario.horizon) {
    throw std::invalid_argument("run_replications: burn-in must be shorter than the horizon");
  }
  for (std::int64_t c : scenario.checkpoints) {
    if (c < 1 || c > scenario.horizon) {
      throw std::invalid_argument("run_replications: checkpoint outside [1, horizon]");
    }
  }

  const auto reps = static_cast<std::size_t>(replications);
  const auto n = static_cast<std::size_t>(scenario.horizon);
  const auto threads = static_cast<std::size_t>(
      std::clamp<std::int64_t>(parallelism, 1, replications));

  AggregateResult agg;
  agg.replications = replications;
  agg.master_seed = master_seed;
  agg.oracle_per_period = oracle_per_period;
  agg.checkpoints = scenario.checkpoints;
  agg.expected_reward.assign(n, 0.0);
  agg.realized_reward.assign(n, 0.0);
  agg.demanded.assign(n, 0.0);

  // IUB's placement depends only on the scenario; solve it once.
  std::optional<std::vector<int>> shared_iub;
  if (kind.type == PolicyType::kIub) {
    Rng unused(0);
    shared_iub = CachePolicy(kind, scenario.catalog, scenario.capacity, &scenario.profile,
                             scenario.profile.users)
                     .select(PolicyState(scenario.catalog.num_files()), unused);
  }

  std::vector<double> hits(reps);
  std::vector<std::vector<double>> acc(scenario.checkpoints.size(), std::vector<double>(reps));

  // Episodes run a block at a time so memory stays bounded; each block is
  // folded into the sums in replication order.
  const std::size_t block = std::max<std::size_t>(64, threads * 16);
  std::vector<EpisodeSummary> results(std::min(block, reps));
  for (std::size_t base = 0; base < reps; base += block) {
    const std::size_t count = std::min(block, reps - base);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          results[i] = summarize(scenario, kind, derive_seed(master_seed, base + i),
                                 shared_iub ? &*shared_iub : nullptr);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    };
    if (threads == 1) {
      worker();
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t t = 0; t < std::min(threads, count); ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    for (std::size_t i = 0; i < count; ++i) {
      const EpisodeSummary& e = results[i];
      hits[base + i] = e.hit_rate;
      for (std::size_t c = 0; c < acc.size(); ++c) acc[c][base + i] = e.acc_at_checkpoints[c];
      for (std::size_t t = 0; t < n; ++t) {
        agg.expected_reward[t] += e.expected[t];
        agg.realized_reward[t] += e.realized[t];
        agg.demanded[t] += e.demanded[t];
      }
    }
  }

  agg.hit_rate_pct = mean_stderr(hits);
  for (std::size_t c = 0; c < acc.size(); ++c) {
    agg.acc_reward.push_back(mean_stderr(acc[c]));
    const auto t = static_cast<double>(scenario.checkpoints[c]);
    std::vector<double> regret(reps);
    for (std::size_t i = 0; i < reps; ++i) regret[i] = t * oracle_per_period - acc[c][i];
    agg.regret.push_back(mean_stderr(regret));
  }
  const auto r = static_cast<double>(reps);
  for (std::size_t t = 0; t < n; ++t) {
    agg.expected_reward[t] /= r;
    agg.realized_reward[t] /= r;
    agg.demanded[t] /= r;
  }
  return agg;
}

}  // namespace edgecache
