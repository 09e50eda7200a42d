#ifndef EDGECACHE_POLICIES_HPP
#define EDGECACHE_POLICIES_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgecache/catalog.hpp"
#include "edgecache/random.hpp"
#include "edgecache/spo.hpp"

namespace edgecache {

enum class PolicyType { kCucb, kMcucb, kEpsGreedy, kIub, kMyopic, kRandom };

std::string_view to_string(PolicyType type);
/// Accepts the lower-case names: cucb, mcucb, eps_greedy, iub, myopic, random.
PolicyType parse_policy_type(std::string_view name);

enum class SolverKind { kGreedy, kGreedySkip, kBranchAndBound };

std::string_view to_string(SolverKind kind);
/// Accepts greedy, greedy_skip, bnb.
SolverKind parse_solver_kind(std::string_view name);

/// Policy and its parameters. Only the fields relevant to `type` are read.
struct PolicyKind {
  PolicyType type = PolicyType::kMcucb;
  double epsilon = 0.07;            // kEpsGreedy
  std::optional<double> gamma_hat;  // kMcucb; unset means "use the true gamma"
  bool fit_gamma = false;           // kMcucb; estimate gamma from the warm-up
  SolverKind solver = SolverKind::kGreedy;
  Seconds timeout = kDefaultBnbTimeout;

  bool operator==(const PolicyKind&) const = default;

  bool learns() const {
    return type == PolicyType::kCucb || type == PolicyType::kMcucb ||
           type == PolicyType::kEpsGreedy;
  }
};

/// What a learning policy knows after observing its own caches.
struct PolicyState {
  std::vector<double> reward_mean;        // sample mean of d_f * S_f
  std::vector<std::int64_t> placements;   // periods file f was cached
  std::int64_t period = 0;                // periods observed so far
  std::vector<int> last_cache;
  std::vector<int> last_requested;        // files of last_cache with demand >= 1

  PolicyState() = default;
  explicit PolicyState(int num_files)
      : reward_mean(static_cast<std::size_t>(num_files), 0.0),
        placements(static_cast<std::size_t>(num_files), 0) {}

  /// State seeded from prior reward-scale estimates, one pseudo-observation
  /// each. Learning policies started from it skip the warm-up.
  static PolicyState with_prior(std::vector<double> prior_reward_mean);
};

/// CUCB optimistic index: mu + U*S*sqrt(3 ln t / (2T)).
/// T == 0 yields +infinity.
double cucb_index(double mu_hat, std::int64_t placements, std::int64_t t,
                  int users, int size);

/// MCUCB index: mu + (U*S / F^gamma_hat) * sqrt(3 ln(U t) / (2 U T)).
/// T == 0 yields +infinity.
double mcucb_index(double mu_hat, std::int64_t placements, std::int64_t t,
                   int users, int size, double gamma_hat, int num_files);

/// Record one period of demand for the files in `cache`. Files outside the
/// cache are not observed and keep their estimates.
void observe(PolicyState& state, const std::vector<int>& cache,
             const DemandVector& demands, const Catalog& catalog);

/// Warm-up schedule: caches packed first-fit by decreasing size over the
/// files not yet covered, until every file has been cached once.
/// Throws std::invalid_argument when capacity < largest file size.
std::vector<std::vector<int>> init_cucb(const Catalog& catalog, std::int64_t capacity);

/// Random feasible set: scan a uniform permutation of `candidates` and take
/// every file that still fits in `room`.
void random_fill(const Catalog& catalog, std::vector<int> candidates,
                 std::int64_t room, Rng& rng, std::vector<int>& cache);

/// Least-squares slope of log(estimated popularity) against log(rank),
/// negated. Files with no positive estimate are ignored. Returns 0 when
/// fewer than two files qualify.
double fit_zipf_exponent(const PolicyState& state, const Catalog& catalog);

/// One policy instance, bound to a catalog and cache size for an episode.
///
/// Learning policies (CUCB, MCUCB, eps-greedy) first run the warm-up
/// schedule unless the state already has every file observed. IUB needs the
/// true profile; the others never see it.
class CachePolicy {
 public:
  /// `iub_cache`, if given, replaces IUB's own solve on `truth`.
  CachePolicy(PolicyKind kind, const Catalog& catalog, std::int64_t capacity,
              const PopularityProfile* truth = nullptr, int users = 0,
              const std::vector<int>* iub_cache = nullptr);

  /// Cache for the next period (sorted file indices).
  std::vector<int> select(const PolicyState& state, Rng& rng);

  const PolicyKind& kind() const { return kind_; }
  std::int64_t explore_periods() const { return explore_periods_; }
  std::int64_t exploit_periods() const { return exploit_periods_; }
  std::size_t warmup_length() const { return warmup_.size(); }
  double gamma_hat() const { return gamma_hat_; }

 private:
  std::vector<int> solve(const std::vector<double>& values) const;
  std::vector<int> random_set(Rng& rng) const;

  PolicyKind kind_;
  const Catalog& catalog_;
  std::int64_t capacity_;
  int users_;
  double gamma_hat_ = 0.0;
  bool gamma_fitted_ = false;
  std::vector<std::vector<int>> warmup_;
  std::vector<int> fixed_cache_;  // IUB
  std::int64_t explore_periods_ = 0;
  std::int64_t exploit_periods_ = 0;
};

/// Stateless convenience wrapper around CachePolicy::select.
std::vector<int> select_cache(const PolicyKind& kind, const PolicyState& state,
                              const Catalog& catalog, std::int64_t capacity,
                              Rng& rng, const PopularityProfile* truth = nullptr,
                              int users = 0);

}  // namespace edgecache

#endif  // EDGECACHE_POLICIES_HPP
