#include "edgecache/policies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace edgecache {

std::string_view to_string(PolicyType type) {
  switch (type) {
    case PolicyType::kCucb:
      return "cucb";
    case PolicyType::kMcucb:
      return "mcucb";
    case PolicyType::kEpsGreedy:
      return "eps_greedy";
    case PolicyType::kIub:
      return "iub";
    case PolicyType::kMyopic:
      return "myopic";
    case PolicyType::kRandom:
      return "random";
  }
  return "unknown";
}

PolicyType parse_policy_type(std::string_view name) {
  for (auto t : {PolicyType::kCucb, PolicyType::kMcucb, PolicyType::kEpsGreedy,
                 PolicyType::kIub, PolicyType::kMyopic, PolicyType::kRandom}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown policy type '" + std::string(name) + "'");
}

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::kGreedy:
      return "greedy";
    case SolverKind::kGreedySkip:
      return "greedy_skip";
    case SolverKind::kBranchAndBound:
      return "bnb";
  }
  return "unknown";
}

SolverKind parse_solver_kind(std::string_view name) {
  for (auto k : {SolverKind::kGreedy, SolverKind::kGreedySkip, SolverKind::kBranchAndBound}) {
    if (to_string(k) == name) return k;
  }
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

PolicyState PolicyState::with_prior(std::vector<double> prior_reward_mean) {
  PolicyState s;
  s.placements.assign(prior_reward_mean.size(), 1);
  s.reward_mean = std::move(prior_reward_mean);
  return s;
}

double cucb_index(double mu_hat, std::int64_t placements, std::int64_t t,
                  int users, int size) {
  if (placements <= 0) return std::numeric_limits<double>::infinity();
  const double log_t = std::log(static_cast<double>(std::max<std::int64_t>(t, 1)));
  return mu_hat + static_cast<double>(users) * size *
                      std::sqrt(3.0 * log_t / (2.0 * static_cast<double>(placements)));
}

double mcucb_index(double mu_hat, std::int64_t placements, std::int64_t t,
                   int users, int size, double gamma_hat, int num_files) {
  if (placements <= 0) return std::numeric_limits<double>::infinity();
  const double u = users;
  const double log_ut = std::log(u * static_cast<double>(std::max<std::int64_t>(t, 1)));
  const double scale = u * size / std::pow(static_cast<double>(num_files), gamma_hat);
  return mu_hat + scale * std::sqrt(3.0 * log_ut / (2.0 * u * static_cast<double>(placements)));
}

void observe(PolicyState& state, const std::vector<int>& cache,
             const DemandVector& demands, const Catalog& catalog) {
  state.last_requested.clear();
  for (int f : cache) {
    const auto k = static_cast<std::size_t>(f);
    const int d = demands.counts[k];
    const double reward = static_cast<double>(d) * catalog.size(f);
    const auto n = static_cast<double>(state.placements[k]);
    state.reward_mean[k] = (state.reward_mean[k] * n + reward) / (n + 1.0);
    ++state.placements[k];
    if (d >= 1) state.last_requested.push_back(f);
  }
  state.last_cache = cache;
  ++state.period;
}

std::vector<std::vector<int>> init_cucb(const Catalog& catalog, std::int64_t capacity) {
  if (capacity < catalog.largest_size()) {
    throw std::invalid_argument("warm-up impossible: cache smaller than the largest file");
  }
  std::vector<int> pending(static_cast<std::size_t>(catalog.num_files()));
  std::iota(pending.begin(), pending.end(), 0);
  std::stable_sort(pending.begin(), pending.end(),
                   [&](int a, int b) { return catalog.size(a) > catalog.size(b); });

  std::vector<std::vector<int>> schedule;
  while (!pending.empty()) {
    std::vector<int> cache;
    std::vector<int> rest;
    std::int64_t room = capacity;
    for (int f : pending) {
      if (catalog.size(f) <= room) {
        cache.push_back(f);
        room -= catalog.size(f);
      } else {
        rest.push_back(f);
      }
    }
    std::sort(cache.begin(), cache.end());
    schedule.push_back(std::move(cache));
    pending = std::move(rest);
  }
  return schedule;
}

void random_fill(const Catalog& catalog, std::vector<int> candidates,
                 std::int64_t room, Rng& rng, std::vector<int>& cache) {
  // Lazy Fisher-Yates: position i receives a uniform pick from the rest, so
  // the scan order is a uniform permutation, drawn only as far as needed.
  const int smallest = catalog.smallest_size();
  const std::size_t n = candidates.size();
  for (std::size_t i = 0; i < n && room >= smallest; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(n - i));
    std::swap(candidates[i], candidates[j]);
    const int f = candidates[i];
    if (catalog.size(f) <= room) {
      cache.push_back(f);
      room -= catalog.size(f);
    }
  }
  std::sort(cache.begin(), cache.end());
}

double fit_zipf_exponent(const PolicyState& state, const Catalog& catalog) {
  std::vector<double> pop;
  for (int f = 0; f < catalog.num_files(); ++f) {
    const double p = state.reward_mean[static_cast<std::size_t>(f)] / catalog.size(f);
    if (p > 0.0) pop.push_back(p);
  }
  if (pop.size() < 2) return 0.0;
  std::sort(pop.begin(), pop.end(), std::greater<>());
  const auto n = static_cast<double>(pop.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    const double x = std::log(static_cast<double>(i + 1));
    const double y = std::log(pop[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double var = sxx - sx * sx / n;
  if (var <= 0.0) return 0.0;
  const double slope = (sxy - sx * sy / n) / var;
  return std::max(0.0, -slope);
}

CachePolicy::CachePolicy(PolicyKind kind, const Catalog& catalog, std::int64_t capacity,
                         const PopularityProfile* truth, int users,
                         const std::vector<int>* iub_cache)
    : kind_(kind), catalog_(catalog), capacity_(capacity), users_(users) {
  if (capacity < 0) throw std::invalid_argument("negative cache capacity");
  if (kind_.learns()) {
    if (users_ < 1) throw std::invalid_argument("learning policies need the user count");
    warmup_ = init_cucb(catalog, capacity);
  }
  if (kind_.type == PolicyType::kMcucb) {
    if (kind_.gamma_hat) {
      gamma_hat_ = *kind_.gamma_hat;
    } else if (!kind_.fit_gamma) {
      throw std::invalid_argument("mcucb needs gamma_hat or fit_gamma");
    }
  }
  if (kind_.type == PolicyType::kIub && iub_cache != nullptr) {
    fixed_cache_ = *iub_cache;
  } else if (kind_.type == PolicyType::kIub) {
    if (truth == nullptr) throw std::invalid_argument("iub needs the true popularity profile");
    std::vector<double> values(static_cast<std::size_t>(catalog.num_files()));
    for (int f = 0; f < catalog.num_files(); ++f) {
      values[static_cast<std::size_t>(f)] = truth->theta[static_cast<std::size_t>(f)] * catalog.size(f);
    }
    fixed_cache_ = solve(values);
  }
}

std::vector<int> CachePolicy::solve(const std::vector<double>& values) const {
  switch (kind_.solver) {
    case SolverKind::kGreedy:
      return greedy_pick(values, catalog_.sizes(), capacity_);
    case SolverKind::kGreedySkip:
      return greedy_pick(values, catalog_.sizes(), capacity_, GreedyVariant::kSkipAndContinue);
    case SolverKind::kBranchAndBound: {
      SpoInstance inst;
      inst.values = values;
      inst.weights.assign(catalog_.sizes().begin(), catalog_.sizes().end());
      inst.capacity = capacity_;
      return solve_bnb(inst, kind_.timeout).selected();
    }
  }
  return {};
}

std::vector<int> CachePolicy::random_set(Rng& rng) const {
  std::vector<int> all(static_cast<std::size_t>(catalog_.num_files()));
  std::iota(all.begin(), all.end(), 0);
  std::vector<int> cache;
  random_fill(catalog_, std::move(all), capacity_, rng, cache);
  return cache;
}

std::vector<int> CachePolicy::select(const PolicyState& state, Rng& rng) {
  switch (kind_.type) {
    case PolicyType::kIub:
      return fixed_cache_;
    case PolicyType::kRandom:
      return random_set(rng);
    case PolicyType::kMyopic: {
      if (state.period == 0) return random_set(rng);
      std::vector<int> cache = state.last_requested;
      std::vector<char> kept(static_cast<std::size_t>(catalog_.num_files()), 0);
      std::int64_t room = capacity_;
      for (int f : cache) {
        kept[static_cast<std::size_t>(f)] = 1;
        room -= catalog_.size(f);
      }
      std::vector<int> candidates;
      for (int f = 0; f < catalog_.num_files(); ++f) {
        if (!kept[static_cast<std::size_t>(f)]) candidates.push_back(f);
      }
      random_fill(catalog_, std::move(candidates), room, rng, cache);
      return cache;
    }
    default:
      break;
  }

  if (static_cast<std::size_t>(state.period) < warmup_.size() &&
      std::find(state.placements.begin(), state.placements.end(), 0) != state.placements.end()) {
    return warmup_[static_cast<std::size_t>(state.period)];
  }

  const auto n = static_cast<std::size_t>(catalog_.num_files());
  std::vector<double> values(n);
  // Both indices are mu + coef * S / sqrt(T); coef is hoisted out of the loop.
  auto optimistic = [&](double coef) {
    for (std::size_t f = 0; f < n; ++f) {
      const auto t = state.placements[f];
      values[f] = t <= 0 ? std::numeric_limits<double>::infinity()
                         : state.reward_mean[f] + coef * catalog_.size(static_cast<int>(f)) /
                                                      std::sqrt(static_cast<double>(t));
    }
  };
  const double period = static_cast<double>(std::max<std::int64_t>(state.period, 1));
  const double users = users_;
  switch (kind_.type) {
    case PolicyType::kCucb:
      optimistic(users * std::sqrt(1.5 * std::log(period)));
      return solve(values);
    case PolicyType::kMcucb: {
      if (kind_.fit_gamma && !gamma_fitted_) {
        gamma_hat_ = fit_zipf_exponent(state, catalog_);
        gamma_fitted_ = true;
      }
      const double damp = std::pow(static_cast<double>(catalog_.num_files()), gamma_hat_);
      optimistic(users / damp * std::sqrt(1.5 * std::log(users * period) / users));
      return solve(values);
    }
    case PolicyType::kEpsGreedy:
      if (rng.bernoulli(kind_.epsilon)) {
        ++explore_periods_;
        return random_set(rng);
      }
      ++exploit_periods_;
      return solve(state.reward_mean);
    default:
      break;
  }
  return {};
}

std::vector<int> select_cache(const PolicyKind& kind, const PolicyState& state,
                              const Catalog& catalog, std::int64_t capacity, Rng& rng,
                              const PopularityProfile* truth, int users) {
  CachePolicy policy(kind, catalog, capacity, truth, users);
  return policy.select(state, rng);
}

}  // namespace edgecache
