#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "edgecache/engine.hpp"

using namespace edgecache;

namespace {

Catalog default_catalog() {
  const std::vector<SizeClass> classes{{1, 200}, {3, 200}, {5, 200}, {7, 200}, {9, 200}};
  return build_catalog(classes);
}

PolicyKind kind_of(PolicyType type) {
  PolicyKind k;
  k.type = type;
  return k;
}

}  // namespace

TEST(Episode, IubToyExpectedReward) {
  const Catalog c({1, 3, 5}, {0, 1, 2});
  // theta = (3,2,1) gives values (3,6,5)
  PopularityProfile p;
  p.gamma = 0;
  p.users = 6;
  p.theta = {3, 2, 1};
  p.probs = {0.5, 1.0 / 3.0, 1.0 / 6.0};
  p.cdf = {0.5, 5.0 / 6.0, 1.0};
  PolicyKind k = kind_of(PolicyType::kIub);
  k.solver = SolverKind::kBranchAndBound;
  const auto trace = run_episode(k, c, p, 5, 10, 1);
  EXPECT_DOUBLE_EQ(trace.acc_expected.back(), 90.0);
  for (const auto& r : trace.periods) EXPECT_EQ(r.cache, (std::vector<int>{0, 1}));
}

TEST(Episode, RandomWithRoomForEverything) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  const auto trace = run_episode(kind_of(PolicyType::kRandom), c, p, 5000, 20, 3);
  EXPECT_DOUBLE_EQ(hit_rate(trace, 0), 100.0);
}

TEST(Episode, Deterministic) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  for (auto type : {PolicyType::kMcucb, PolicyType::kEpsGreedy, PolicyType::kMyopic}) {
    const auto a = run_episode(kind_of(type), c, p, 256, 80, 42);
    const auto b = run_episode(kind_of(type), c, p, 256, 80, 42);
    ASSERT_EQ(a.periods.size(), 80u);
    for (std::size_t t = 0; t < 80; ++t) {
      ASSERT_EQ(a.periods[t].cache, b.periods[t].cache);
      ASSERT_EQ(a.periods[t].realized, b.periods[t].realized);
      ASSERT_EQ(a.periods[t].demanded, b.periods[t].demanded);
    }
    ASSERT_EQ(a.acc_expected, b.acc_expected);
  }
}

TEST(Episode, AccountingInvariants) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.9, 100);
  const auto trace = run_episode(kind_of(PolicyType::kEpsGreedy), c, p, 256, 300, 5);
  double acc = 0;
  for (std::size_t t = 0; t < trace.periods.size(); ++t) {
    const auto& r = trace.periods[t];
    ASSERT_LE(r.realized, r.demanded);
    ASSERT_GE(r.realized, 0);
    double expected = 0;
    for (int f : r.cache) expected += p.theta[static_cast<std::size_t>(f)] * c.size(f);
    ASSERT_NEAR(r.expected, expected, 1e-9);
    acc += r.expected;
    ASSERT_NEAR(trace.acc_expected[t], acc, 1e-6);
    if (t) ASSERT_GE(trace.acc_expected[t], trace.acc_expected[t - 1]);
  }
}

TEST(Episode, CommonDemandAcrossPolicies) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  const auto a = run_episode(kind_of(PolicyType::kRandom), c, p, 256, 50, 9);
  const auto b = run_episode(kind_of(PolicyType::kMyopic), c, p, 256, 50, 9);
  for (std::size_t t = 0; t < 50; ++t) ASSERT_EQ(a.periods[t].demanded, b.periods[t].demanded);
}

TEST(Episode, WarmStartSkipsWarmup) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  EpisodeOptions opts;
  std::vector<double> prior(1000);
  for (std::size_t f = 0; f < prior.size(); ++f) prior[f] = p.theta[f] * c.size(static_cast<int>(f));
  opts.prior = prior;
  const auto trace = run_episode(kind_of(PolicyType::kMcucb), c, p, 256, 5, 1, opts);
  const auto schedule = init_cucb(c, 256);
  EXPECT_NE(trace.periods[0].cache, schedule[0]);
}

TEST(Episode, RejectsBadInput) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  EXPECT_THROW(run_episode(kind_of(PolicyType::kMcucb), c, p, 8, 10, 1), std::invalid_argument);
  EXPECT_THROW(run_episode(kind_of(PolicyType::kRandom), c, p, 256, 0, 1), std::invalid_argument);
}

TEST(Regret, IubAgainstItselfIsZero) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  PolicyKind k = kind_of(PolicyType::kIub);
  k.solver = SolverKind::kBranchAndBound;
  const auto oracle = oracle_reference(c, p, 256);
  const auto trace = run_episode(k, c, p, 256, 100, 1);
  for (double r : regret_of(trace, oracle.per_period).regret) EXPECT_NEAR(r, 0.0, 1e-6);
}

TEST(Regret, NondecreasingAgainstTrueOptimum) {
  const std::vector<SizeClass> classes{{1, 20}, {3, 20}, {5, 20}, {7, 20}, {9, 20}};
  const Catalog c = build_catalog(classes);
  const auto p = zipf_profile(100, 0.56, 100);
  const auto oracle = oracle_reference(c, p, 125);
  ASSERT_EQ(oracle.status, SpoStatus::kOptimal);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto type = std::array{PolicyType::kMcucb, PolicyType::kEpsGreedy, PolicyType::kRandom,
                                 PolicyType::kMyopic}[seed % 4];
    const auto trace = run_episode(kind_of(type), c, p, 125, 120, seed);
    const auto r = regret_of(trace, oracle.per_period).regret;
    for (std::size_t t = 1; t < r.size(); ++t) ASSERT_GE(r[t], r[t - 1] - 1e-9);
  }
}

TEST(Regret, RandomSlopeMatchesMonteCarlo) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 1.0, 100);
  const auto oracle = oracle_reference(c, p, 256);
  // independent estimate of the random policy's expected reward
  CachePolicy random(kind_of(PolicyType::kRandom), c, 256);
  PolicyState s(1000);
  Rng rng(77);
  double mean = 0;
  for (int i = 0; i < 10000; ++i) {
    for (int f : random.select(s, rng)) mean += p.theta[static_cast<std::size_t>(f)] * c.size(f);
  }
  mean /= 10000;
  const auto trace = run_episode(kind_of(PolicyType::kRandom), c, p, 256, 2000, 3);
  const auto r = regret_of(trace, oracle.per_period).regret;
  const double slope = r.back() / 2000.0;
  EXPECT_NEAR(slope, oracle.per_period - mean, 0.02 * (oracle.per_period - mean));
}

TEST(HitRate, Bounds) {
  EpisodeTrace t;
  t.horizon = 3;
  t.periods = {{{}, 5, 0, 5}, {{}, 3, 0, 3}, {{}, 0, 0, 4}};
  EXPECT_DOUBLE_EQ(hit_rate(t, 0), 100.0 * 8 / 12);
  EXPECT_DOUBLE_EQ(hit_rate(t, 2), 0.0);
  EXPECT_THROW(hit_rate(t, 3), std::invalid_argument);
  EXPECT_THROW(hit_rate(t, -1), std::invalid_argument);
  EpisodeTrace none;
  none.horizon = 1;
  none.periods = {{{}, 0, 0, 0}};
  EXPECT_THROW(hit_rate(none, 0), std::invalid_argument);
}

TEST(HitRate, RandomUniformNearCacheShare) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.0, 100);
  Scenario sc{c, p, 256, 3000, 2000, {3000}};
  const auto r = run_replications(sc, kind_of(PolicyType::kRandom), 0.0, 20, 1, 1);
  EXPECT_NEAR(r.hit_rate_pct.mean, 5.12, 1.0);
}

TEST(HitRate, IubBurnInConsistency) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  PolicyKind k = kind_of(PolicyType::kIub);
  std::vector<double> with, without;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto trace = run_episode(k, c, p, 256, 2400, s);
    with.push_back(hit_rate(trace, 2000));
    without.push_back(hit_rate(trace, 0));
  }
  const auto a = mean_stderr(with), b = mean_stderr(without);
  EXPECT_LE(std::abs(a.mean - b.mean), 3.0 * std::hypot(a.stderr_, b.stderr_));
}

TEST(Replications, SingleRunMatchesEpisode) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  Scenario sc{c, p, 256, 2100, 2000, {100, 2100}};
  const auto oracle = oracle_reference(c, p, 256);
  const auto r = run_replications(sc, kind_of(PolicyType::kEpsGreedy), oracle.per_period, 1, 5, 1);
  const auto trace = run_episode(kind_of(PolicyType::kEpsGreedy), c, p, 256, 2100, derive_seed(5, 0));
  EXPECT_DOUBLE_EQ(r.hit_rate_pct.mean, hit_rate(trace, 2000));
  EXPECT_EQ(r.hit_rate_pct.stderr_, 0.0);
  EXPECT_DOUBLE_EQ(r.acc_reward[0].mean, trace.acc_expected[99]);
  EXPECT_DOUBLE_EQ(r.regret[1].mean, 2100 * oracle.per_period - trace.acc_expected[2099]);
}

TEST(Replications, ParallelismDoesNotChangeResults) {
  const std::vector<SizeClass> classes{{1, 20}, {3, 20}, {5, 20}, {7, 20}, {9, 20}};
  const Catalog c = build_catalog(classes);
  const auto p = zipf_profile(100, 0.56, 100);
  Scenario sc{c, p, 125, 400, 200, {100, 400}};
  const auto a = run_replications(sc, kind_of(PolicyType::kMcucb), 100.0, 150, 3, 1);
  const auto b = run_replications(sc, kind_of(PolicyType::kMcucb), 100.0, 150, 3, 4);
  EXPECT_EQ(a.hit_rate_pct.mean, b.hit_rate_pct.mean);
  EXPECT_EQ(a.hit_rate_pct.stderr_, b.hit_rate_pct.stderr_);
  EXPECT_EQ(a.expected_reward, b.expected_reward);
  EXPECT_EQ(a.regret[1].mean, b.regret[1].mean);
  EXPECT_GE(a.hit_rate_pct.mean, 0.0);
  EXPECT_LE(a.hit_rate_pct.mean, 100.0);
}

TEST(Replications, DominanceUnderOptimalOracle) {
  const std::vector<SizeClass> classes{{1, 20}, {3, 20}, {5, 20}, {7, 20}, {9, 20}};
  const Catalog c = build_catalog(classes);
  const auto p = zipf_profile(100, 0.8, 100);
  const auto oracle = oracle_reference(c, p, 125);
  ASSERT_EQ(oracle.status, SpoStatus::kOptimal);
  Scenario sc{c, p, 125, 300, 100, {300}};
  for (auto type : {PolicyType::kCucb, PolicyType::kMcucb, PolicyType::kEpsGreedy,
                    PolicyType::kIub, PolicyType::kMyopic, PolicyType::kRandom}) {
    const auto r = run_replications(sc, kind_of(type), oracle.per_period, 10, 1, 1);
    for (double e : r.expected_reward) ASSERT_LE(e, oracle.per_period + 1e-9);
  }
}

TEST(Replications, RejectsBadArguments) {
  const Catalog c = default_catalog();
  const auto p = zipf_profile(1000, 0.56, 100);
  Scenario sc{c, p, 256, 100, 50, {100}};
  EXPECT_THROW(run_replications(sc, kind_of(PolicyType::kRandom), 0, 0, 1, 1), std::invalid_argument);
  sc.checkpoints = {101};
  EXPECT_THROW(run_replications(sc, kind_of(PolicyType::kRandom), 0, 1, 1, 1), std::invalid_argument);
}

TEST(Stats, MeanStderr) {
  const auto m = mean_stderr({1, 2, 3, 4});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.stderr_, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(mean_stderr({7}).stderr_, 0.0);
}
