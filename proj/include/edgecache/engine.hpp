#ifndef EDGECACHE_ENGINE_HPP
#define EDGECACHE_ENGINE_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "edgecache/catalog.hpp"
#include "edgecache/policies.hpp"
#include "edgecache/spo.hpp"

namespace edgecache {

inline constexpr std::int64_t kDefaultBurnIn = 2000;

struct PeriodRecord {
  std::vector<int> cache;      // empty unless caches are recorded
  std::int64_t realized = 0;   // sum over cached f of d_f * S_f
  double expected = 0.0;       // sum over cached f of theta_f * S_f
  std::int64_t demanded = 0;   // sum over all f of d_f * S_f
};

struct EpisodeTrace {
  std::vector<PeriodRecord> periods;
  std::vector<double> acc_expected;  // running sum of expected rewards
  std::int64_t horizon = 0;
};

struct EpisodeOptions {
  bool record_caches = true;
  // Reward-scale prior estimates; when set, learning policies skip warm-up.
  std::optional<std::vector<double>> prior;
  // IUB placement solved once by the caller and shared across episodes.
  const std::vector<int>* iub_cache = nullptr;
};

/// One episode of N periods. Each period: the policy picks the cache, user
/// demand is sampled, cached files earn their demand times size, and the
/// policy observes the demand of cached files only.
///
/// Demand and policy randomness come from separate streams derived from
/// `seed`, so every policy run with the same seed faces the same requests.
EpisodeTrace run_episode(const PolicyKind& kind, const Catalog& catalog,
                         const PopularityProfile& profile, std::int64_t capacity,
                         std::int64_t horizon, std::uint64_t seed,
                         const EpisodeOptions& options = {});

struct RegretSeries {
  double oracle_per_period = 0.0;
  std::vector<double> regret;  // regret[t-1] = t * oracle - acc_expected[t-1]
};

RegretSeries regret_of(const EpisodeTrace& trace, double oracle_per_period);

/// Percentage of requested bytes served from the cache after `burn_in`
/// periods. Throws std::invalid_argument if burn_in >= horizon or nothing was
/// requested.
double hit_rate(const EpisodeTrace& trace, std::int64_t burn_in = kDefaultBurnIn);

/// Best known expected per-period reward on the true profile.
struct OracleReference {
  double per_period = 0.0;
  SpoStatus status = SpoStatus::kOptimal;
  std::vector<int> cache;
};

/// Branch and bound on the true values; if it times out, the better of its
/// incumbent and the greedy solution is used and the status says so.
OracleReference oracle_reference(const Catalog& catalog, const PopularityProfile& profile,
                                 std::int64_t capacity, Seconds timeout = kDefaultBnbTimeout);

struct Scenario {
  Catalog catalog;
  PopularityProfile profile;
  std::int64_t capacity = 0;
  std::int64_t horizon = 0;
  std::int64_t burn_in = kDefaultBurnIn;
  std::vector<std::int64_t> checkpoints;  // periods (1-based) to report
};

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

struct AggregateResult {
  std::int64_t replications = 0;
  std::uint64_t master_seed = 0;
  std::uint64_t fingerprint = 0;  // set by the caller that owns the config
  double oracle_per_period = 0.0;

  MeanStderr hit_rate_pct;
  std::vector<std::int64_t> checkpoints;
  std::vector<MeanStderr> regret;      // one per checkpoint
  std::vector<MeanStderr> acc_reward;  // one per checkpoint

  // Per-period means over replications.
  std::vector<double> expected_reward;
  std::vector<double> realized_reward;
  std::vector<double> demanded;
};

/// R independent episodes; replication i uses derive_seed(master_seed, i).
/// Episodes run on up to `parallelism` threads and are reduced in
/// replication order, so the result does not depend on `parallelism`.
AggregateResult run_replications(const Scenario& scenario, const PolicyKind& kind,
                                 double oracle_per_period, std::int64_t replications,
                                 std::uint64_t master_seed, int parallelism = 1);

MeanStderr mean_stderr(const std::vector<double>& samples);

}  // namespace edgecache

#endif  // EDGECACHE_ENGINE_HPP
