#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "edgecache/catalog.hpp"
#include "edgecache/spo.hpp"

using namespace edgecache;

namespace {

SpoInstance toy() { return {{3, 6, 5}, {1, 3, 5}, 5}; }

std::int64_t weight_of(const SpoInstance& inst, const std::vector<char>& x) {
  std::int64_t w = 0;
  for (std::size_t i = 0; i < x.size(); ++i) w += x[i] ? inst.weights[i] : 0;
  return w;
}

// Zipf-valued instance with sizes from {1,3,5,7,9}, F in [1, max_f].
struct ZipfCase {
  Catalog catalog;
  double gamma;
  SpoInstance inst;
};

ZipfCase zipf_case(Rng& rng, int max_f, bool equal_sizes = false) {
  const int f = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_f)));
  const int size_set[] = {1, 3, 5, 7, 9};
  std::vector<int> sizes(static_cast<std::size_t>(f));
  const int only = size_set[rng.below(5)];
  for (auto& s : sizes) s = equal_sizes ? only : size_set[rng.below(5)];
  std::vector<int> ids(sizes.size());
  std::iota(ids.begin(), ids.end(), 0);
  Catalog catalog(sizes, ids);
  const double gamma = 2.4 * rng.uniform();
  const auto profile = zipf_profile(f, gamma, 100);
  const std::int64_t total = catalog.total_size();
  const std::int64_t m = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total + 1)));
  SpoInstance inst = make_instance(catalog, profile, m);
  return {std::move(catalog), gamma, std::move(inst)};
}

// Arbitrary values, not density sorted.
SpoInstance random_instance(Rng& rng, int max_f) {
  const int f = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_f)));
  SpoInstance inst;
  std::int64_t total = 0;
  for (int i = 0; i < f; ++i) {
    inst.values.push_back(std::floor(rng.uniform() * 100.0) / 4.0);
    inst.weights.push_back(1 + static_cast<int>(rng.below(12)));
    total += inst.weights.back();
  }
  inst.capacity = static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(total + 1)));
  return inst;
}

}  // namespace

TEST(SpoLp, ToyInstance) {
  const auto lp = solve_lp(toy());
  ASSERT_EQ(lp.x.size(), 3u);
  EXPECT_DOUBLE_EQ(lp.x[0], 1.0);
  EXPECT_DOUBLE_EQ(lp.x[1], 1.0);
  EXPECT_NEAR(lp.x[2], 0.2, 1e-15);
  EXPECT_NEAR(lp.value, 10.0, 1e-12);
  ASSERT_TRUE(lp.frac_index.has_value());
  EXPECT_EQ(*lp.frac_index, 2);
  EXPECT_NEAR(*lp.beta, 0.2, 1e-15);
}

TEST(SpoLp, ZeroAndFullCapacity) {
  auto inst = toy();
  inst.capacity = 0;
  const auto empty = solve_lp(inst);
  EXPECT_EQ(empty.value, 0.0);
  for (double x : empty.x) EXPECT_EQ(x, 0.0);
  inst.capacity = 9;
  const auto full = solve_lp(inst);
  EXPECT_DOUBLE_EQ(full.value, 14.0);
  for (double x : full.x) EXPECT_EQ(x, 1.0);
  EXPECT_FALSE(full.frac_index.has_value());
}

TEST(SpoLp, PrefixStructure) {
  Rng rng(11);
  for (int k = 0; k < 500; ++k) {
    const auto inst = random_instance(rng, 30);
    const auto lp = solve_lp(inst);
    const auto order = density_order(inst);
    int fractional = 0;
    double weight = 0.0;
    bool closed = false;  // once below 1, everything after is 0
    for (int i : order) {
      const double x = lp.x[static_cast<std::size_t>(i)];
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 1.0);
      if (x > 0.0 && x < 1.0) ++fractional;
      if (closed) ASSERT_EQ(x, 0.0);
      if (x < 1.0) closed = true;
      weight += x * inst.weights[static_cast<std::size_t>(i)];
    }
    ASSERT_LE(fractional, 1);
    ASSERT_LE(weight, static_cast<double>(inst.capacity) + 1e-9);
  }
}

TEST(SpoGreedy, ToyInstance) {
  const auto g = solve_greedy(toy());
  EXPECT_EQ(g.x, (std::vector<char>{1, 1, 0}));
  EXPECT_DOUBLE_EQ(g.value, 9.0);
  EXPECT_EQ(g.weight, 4);
  EXPECT_EQ(g.status, SpoStatus::kApproximate);
  EXPECT_EQ(g.beta_guarantee, 1.0);
  EXPECT_NEAR(g.alpha_guarantee, 0.9, 1e-12);
}

TEST(SpoGreedy, ZeroCapacity) {
  auto inst = toy();
  inst.capacity = 0;
  const auto g = solve_greedy(inst);
  EXPECT_TRUE(g.selected().empty());
  EXPECT_EQ(g.value, 0.0);
}

TEST(SpoGreedy, SkipVariantKeepsScanning) {
  // floor stops at the 5-unit item; skip-and-continue still takes the last one
  const SpoInstance inst{{3, 6, 5, 0.5}, {1, 3, 5, 1}, 5};
  EXPECT_EQ(solve_greedy(inst).selected(), (std::vector<int>{0, 1}));
  const auto skip = solve_greedy(inst, GreedyVariant::kSkipAndContinue);
  EXPECT_EQ(skip.selected(), (std::vector<int>{0, 1, 3}));
  EXPECT_EQ(skip.alpha_guarantee, 0.0);
}

TEST(SpoGreedy, AlphaIsACertificate) {
  Rng rng(2);
  for (int k = 0; k < 300; ++k) {
    const auto inst = random_instance(rng, 18);
    const auto g = solve_greedy(inst);
    const auto opt = solve_bruteforce(inst);
    ASSERT_GE(g.value + 1e-9, g.alpha_guarantee * opt.value);
  }
}

TEST(SpoGreedy, EqualSizesAreOptimal) {
  Rng rng(3);
  for (int k = 0; k < 500; ++k) {
    const auto c = zipf_case(rng, 20, true);
    ASSERT_EQ(solve_greedy(c.inst).value, solve_bruteforce(c.inst).value);
  }
}

TEST(SpoBnb, ToyInstance) {
  const auto b = solve_bnb(toy());
  EXPECT_EQ(b.selected(), (std::vector<int>{0, 1}));
  EXPECT_DOUBLE_EQ(b.value, 9.0);
  EXPECT_EQ(b.status, SpoStatus::kOptimal);
  EXPECT_EQ(b.alpha_guarantee, 1.0);
}

TEST(SpoBnb, Uncapacitated) {
  auto inst = toy();
  inst.capacity = 100;
  const auto b = solve_bnb(inst);
  EXPECT_EQ(b.x, (std::vector<char>{1, 1, 1}));
  EXPECT_EQ(b.status, SpoStatus::kOptimal);
}

TEST(SpoBnb, MatchesBruteForceOnZipfInstances) {
  Rng rng(4);
  for (int k = 0; k < 1000; ++k) {
    const auto c = zipf_case(rng, 20);
    const auto b = solve_bnb(c.inst);
    ASSERT_EQ(b.status, SpoStatus::kOptimal);
    ASSERT_EQ(b.value, solve_bruteforce(c.inst).value) << "instance " << k;
  }
}

TEST(SpoBnb, MatchesBruteForceOnArbitraryInstances) {
  Rng rng(5);
  for (int k = 0; k < 1000; ++k) {
    const auto inst = random_instance(rng, 20);
    ASSERT_EQ(solve_bnb(inst).value, solve_bruteforce(inst).value) << "instance " << k;
  }
}

TEST(SpoBnb, RejectsNonPositiveTimeout) {
  EXPECT_THROW(solve_bnb(toy(), Seconds(0)), std::invalid_argument);
}

TEST(SpoBnb, TimeoutReturnsIncumbent) {
  // Equal densities with awkward weights make every bound tie, so a tiny
  // limit stops the search early.
  SpoInstance inst;
  Rng rng(8);
  for (int i = 0; i < 3000; ++i) {
    const int w = 1000 + static_cast<int>(rng.below(1000));
    inst.weights.push_back(w);
    inst.values.push_back(w * (1.0 + 1e-7 * rng.uniform()));
  }
  inst.capacity = 777777;
  const auto b = solve_bnb(inst, Seconds(1e-4));
  EXPECT_LE(b.weight, inst.capacity);
  EXPECT_GE(b.value, solve_greedy(inst).value);
  if (b.status != SpoStatus::kOptimal) {
    EXPECT_EQ(b.status, SpoStatus::kTimeoutIncumbent);
    EXPECT_LE(b.alpha_guarantee, 1.0);
  }
}

TEST(SpoBruteForce, Examples) {
  EXPECT_DOUBLE_EQ(solve_bruteforce(toy()).value, 9.0);
  const SpoInstance none{{4, 5}, {6, 7}, 5};
  EXPECT_EQ(solve_bruteforce(none).value, 0.0);
  const SpoInstance one{{4}, {3}, 5};
  EXPECT_EQ(solve_bruteforce(one).selected(), std::vector<int>{0});
  SpoInstance big;
  big.values.assign(26, 1.0);
  big.weights.assign(26, 1);
  big.capacity = 3;
  EXPECT_THROW(solve_bruteforce(big), std::invalid_argument);
}

TEST(SpoInvariants, FeasibilityAndSandwich) {
  Rng rng(6);
  for (int k = 0; k < 1000; ++k) {
    const auto inst = k % 2 ? random_instance(rng, 60) : zipf_case(rng, 60).inst;
    const auto lp = solve_lp(inst);
    const auto g = solve_greedy(inst);
    const auto s = solve_greedy(inst, GreedyVariant::kSkipAndContinue);
    const auto b = solve_bnb(inst);
    for (const auto* sol : {&g, &s, &b}) {
      ASSERT_LE(sol->weight, inst.capacity);
      ASSERT_EQ(sol->weight, weight_of(inst, sol->x));
      ASSERT_EQ(sol->value, evaluate(inst, sol->x));
    }
    ASSERT_LE(g.value, b.value);
    ASSERT_LE(s.value, b.value);
    ASSERT_LE(b.value, lp.value + 1e-9 * std::max(1.0, lp.value));
  }
}

TEST(SpoInvariants, ScaleInvariance) {
  Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    auto inst = random_instance(rng, 20);
    const auto before = solve_bnb(inst).selected();
    for (auto& v : inst.values) v *= 8.0;  // power of two keeps every comparison exact
    ASSERT_EQ(solve_bnb(inst).selected(), before);
  }
}

TEST(SpoInvariants, ZipfRatioBounds) {
  Rng rng(9);
  int checked_two = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto c = zipf_case(rng, 20);
    if (c.inst.capacity < c.catalog.largest_size()) continue;
    const double opt = solve_bruteforce(c.inst).value;
    const double greedy = solve_greedy(c.inst).value;
    const double bound = delta_bound(c.catalog, c.inst.capacity, c.gamma);
    ASSERT_LE(opt / greedy, bound + 1e-9) << "instance " << k;
    if (bound <= 2.0) {
      ++checked_two;
      ASSERT_LE(opt / greedy, 2.0);
    }
  }
  EXPECT_GT(checked_two, 100);
}

TEST(DeltaBound, DefaultSystemBySeries) {
  const std::vector<SizeClass> classes{{1, 200}, {3, 200}, {5, 200}, {7, 200}, {9, 200}};
  const Catalog c = build_catalog(classes);
  double h = 0;
  for (int i = 1; i <= 28; ++i) h += std::pow(i, -0.56);
  const double expected = 1.0 + 9.0 * std::pow(29.0, -0.56) / h;
  EXPECT_NEAR(delta_bound(c, 256, 0.56), expected, 1e-12);
}

TEST(DeltaBound, UniformEqualSizes) {
  const std::vector<SizeClass> classes{{4, 50}};
  const Catalog c = build_catalog(classes);
  for (int k : {1, 2, 5, 10}) EXPECT_NEAR(delta_bound(c, 4 * k, 0.0), 1.0 + 1.0 / k, 1e-12);
}

TEST(DeltaBound, LargeCacheTendsToOne) {
  const std::vector<SizeClass> classes{{1, 10}, {9, 10}};
  const Catalog c = build_catalog(classes);
  EXPECT_LT(delta_bound(c, 9'000'000, 0.56), 1.01);
  EXPECT_THROW(delta_bound(c, 8, 0.56), std::invalid_argument);
}

TEST(SpoInstanceCheck, Validation) {
  EXPECT_THROW((SpoInstance{{1, 2}, {1}, 3}).validate(), std::invalid_argument);
  EXPECT_THROW((SpoInstance{{1}, {0}, 3}).validate(), std::invalid_argument);
  EXPECT_THROW((SpoInstance{{-1}, {1}, 3}).validate(), std::invalid_argument);
  EXPECT_THROW((SpoInstance{{1}, {1}, -1}).validate(), std::invalid_argument);
  EXPECT_NO_THROW(toy().validate());
}
