#include "edgecache/spo.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>

namespace edgecache {

void SpoInstance::validate() const {
  if (values.size() != weights.size()) {
    throw std::invalid_argument("spo instance: values and weights differ in length");
  }
  if (capacity < 0) throw std::invalid_argument("spo instance: negative capacity");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] <= 0) {
      throw std::invalid_argument("spo instance: weight of item " +
                                  std::to_string(i) + " is not positive");
    }
    if (!(values[i] >= 0.0)) {
      throw std::invalid_argument("spo instance: value of item " +
                                  std::to_string(i) + " is negative or NaN");
    }
  }
}

SpoInstance make_instance(const Catalog& catalog,
                          const PopularityProfile& profile,
                          std::int64_t capacity) {
  if (profile.num_files() != catalog.num_files()) {
    throw std::invalid_argument("profile and catalog sizes differ");
  }
  SpoInstance inst;
  inst.capacity = capacity;
  inst.weights.assign(catalog.sizes().begin(), catalog.sizes().end());
  inst.values.resize(inst.weights.size());
  for (std::size_t f = 0; f < inst.values.size(); ++f) {
    inst.values[f] = profile.theta[f] * inst.weights[f];
  }
  return inst;
}

std::string_view to_string(SpoStatus status) {
  switch (status) {
    case SpoStatus::kOptimal:
      return "optimal";
    case SpoStatus::kApproximate:
      return "approximate";
    case SpoStatus::kTimeoutIncumbent:
      return "timeout-incumbent";
  }
  return "unknown";
}

std::vector<int> SpoSolution::selected() const {
  std::vector<int> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

std::vector<int> density_order(const SpoInstance& inst) {
  const auto n = inst.values.size();
  std::vector<double> density(n);
  for (std::size_t i = 0; i < n; ++i) density[i] = inst.values[i] / inst.weights[i];
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = density[static_cast<std::size_t>(a)];
    const double db = density[static_cast<std::size_t>(b)];
    if (da != db) return da > db;
    return a < b;
  });
  return order;
}

double evaluate(const SpoInstance& inst, const std::vector<char>& x) {
  double v = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) v += inst.values[i];
  }
  return v;
}

namespace {

std::int64_t total_weight(const SpoInstance& inst, const std::vector<char>& x) {
  std::int64_t w = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i]) w += inst.weights[i];
  }
  return w;
}

SpoSolution finish(const SpoInstance& inst, std::vector<char> x, SpoStatus status) {
  SpoSolution s;
  s.value = evaluate(inst, x);
  s.weight = total_weight(inst, x);
  s.x = std::move(x);
  s.status = status;
  return s;
}

}  // namespace

namespace {

// Yields item indices in density_order() sequence without sorting the whole
// instance; greedy fills usually stop after a small prefix.
class DensityCursor {
 public:
  explicit DensityCursor(const SpoInstance& inst) : DensityCursor(inst.values, inst.weights) {}

  DensityCursor(std::span<const double> values, std::span<const int> weights) {
    heap_.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      heap_[i] = key(values[i] / weights[i], i);
    }
    std::make_heap(heap_.begin(), heap_.end());
  }

  bool done() const { return heap_.empty(); }

  int next() {
    std::pop_heap(heap_.begin(), heap_.end());
    const auto low = static_cast<std::uint32_t>(heap_.back());
    heap_.pop_back();
    return static_cast<int>(std::numeric_limits<std::uint32_t>::max() - low);
  }

 private:
  // Non-negative doubles order like their bit patterns, so one integer
  // compare gives density first and the lower index on ties.
  using Key = unsigned __int128;
  static Key key(double density, std::size_t i) {
    const auto bits = std::bit_cast<std::uint64_t>(density + 0.0);  // -0 -> +0
    return (static_cast<Key>(bits) << 32) |
           (std::numeric_limits<std::uint32_t>::max() - static_cast<std::uint32_t>(i));
  }

  std::vector<Key> heap_;
};

}  // namespace

FractionalSolution solve_lp(const SpoInstance& inst) {
  inst.validate();
  FractionalSolution sol;
  sol.x.assign(inst.values.size(), 0.0);
  std::int64_t room = inst.capacity;
  DensityCursor cursor(inst);
  while (!cursor.done()) {
    const int i = cursor.next();
    const auto k = static_cast<std::size_t>(i);
    if (inst.weights[k] <= room) {
      sol.x[k] = 1.0;
      room -= inst.weights[k];
      sol.value += inst.values[k];
      continue;
    }
    if (room > 0) {
      const double beta = static_cast<double>(room) / inst.weights[k];
      sol.x[k] = beta;
      sol.value += beta * inst.values[k];
      sol.frac_index = i;
      sol.beta = beta;
    }
    break;
  }
  return sol;
}

SpoSolution solve_greedy(const SpoInstance& inst, GreedyVariant variant) {
  inst.validate();
  std::vector<char> x(inst.values.size(), 0);
  std::int64_t room = inst.capacity;
  int lightest = std::numeric_limits<int>::max();
  for (int w : inst.weights) lightest = std::min(lightest, w);
  double lp_value = 0.0;
  bool lp_done = false;
  DensityCursor cursor(inst);
  while (!cursor.done() && room >= lightest) {
    const auto k = static_cast<std::size_t>(cursor.next());
    if (inst.weights[k] <= room) {
      x[k] = 1;
      room -= inst.weights[k];
      if (!lp_done) lp_value += inst.values[k];
      continue;
    }
    if (!lp_done) {
      lp_value += static_cast<double>(room) / inst.weights[k] * inst.values[k];
      lp_done = true;
    }
    if (variant == GreedyVariant::kFloorLp) break;
  }
  if (!lp_done && room > 0 && !cursor.done()) {
    const auto k = static_cast<std::size_t>(cursor.next());
    lp_value += static_cast<double>(room) / inst.weights[k] * inst.values[k];
  }
  SpoSolution s = finish(inst, std::move(x), SpoStatus::kApproximate);
  if (variant == GreedyVariant::kFloorLp) {
    // opt <= LP value, so value / LP is a certified fraction of the optimum.
    s.alpha_guarantee = lp_value > 0.0 ? std::min(1.0, s.value / lp_value) : 1.0;
    s.beta_guarantee = 1.0;
  } else {
    s.alpha_guarantee = 0.0;
    s.beta_guarantee = 0.0;
  }
  return s;
}

std::vector<int> greedy_pick(std::span<const double> values, std::span<const int> weights,
                             std::int64_t capacity, GreedyVariant variant) {
  std::vector<int> picked;
  if (values.empty()) return picked;
  const int lightest = *std::min_element(weights.begin(), weights.end());
  std::int64_t room = capacity;
  DensityCursor cursor(values, weights);
  while (!cursor.done() && room >= lightest) {
    const int i = cursor.next();
    const int w = weights[static_cast<std::size_t>(i)];
    if (w <= room) {
      picked.push_back(i);
      room -= w;
    } else if (variant == GreedyVariant::kFloorLp) {
      break;
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const SpoInstance& inst, Seconds timeout)
      : inst_(inst),
        order_(density_order(inst)),
        state_(inst.values.size(), kFree),
        deadline_(std::chrono::steady_clock::now() +
                  std::chrono::duration_cast<std::chrono::steady_clock::duration>(timeout)) {}

  SpoSolution run() {
    SpoSolution greedy = solve_greedy(inst_);
    best_x_ = greedy.x;
    best_value_ = greedy.value;
    root_bound_ = solve_lp(inst_).value;

    explore(0.0, inst_.capacity);

    SpoSolution s = finish(inst_, best_x_,
                           timed_out_ ? SpoStatus::kTimeoutIncumbent : SpoStatus::kOptimal);
    s.nodes = nodes_;
    s.beta_guarantee = 1.0;
    if (timed_out_) {
      s.alpha_guarantee = root_bound_ > 0.0 ? std::min(1.0, s.value / root_bound_) : 1.0;
    } else {
      s.alpha_guarantee = 1.0;
    }
    return s;
  }

 private:
  enum : char { kFree = 0, kIn = 1, kOut = 2 };

  bool out_of_time() {
    if (timed_out_) return true;
    if ((nodes_ & 1023) == 0 && std::chrono::steady_clock::now() >= deadline_) {
      timed_out_ = true;
    }
    return timed_out_;
  }

  // LP relaxation over the free items with `room` capacity left. Returns the
  // relaxed value and the fractional item (-1 when the LP optimum is binary).
  // Items are visited in the global density order; restricting an instance
  // does not change the relative order of what is left.
  std::pair<double, int> relax(std::int64_t room) const {
    double value = 0.0;
    for (int i : order_) {
      const auto k = static_cast<std::size_t>(i);
      if (state_[k] != kFree) continue;
      if (inst_.weights[k] <= room) {
        room -= inst_.weights[k];
        value += inst_.values[k];
        continue;
      }
      if (room == 0) return {value, -1};
      value += static_cast<double>(room) / inst_.weights[k] * inst_.values[k];
      return {value, i};
    }
    return {value, -1};
  }

  void accept_binary_relaxation(std::int64_t room) {
    std::vector<char> x(state_.size(), 0);
    for (int i : order_) {
      const auto k = static_cast<std::size_t>(i);
      if (state_[k] == kIn) {
        x[k] = 1;
      } else if (state_[k] == kFree && inst_.weights[k] <= room) {
        x[k] = 1;
        room -= inst_.weights[k];
      } else if (state_[k] == kFree) {
        break;
      }
    }
    // Fixed-in items after the break point still belong to the set.
    for (std::size_t k = 0; k < state_.size(); ++k) {
      if (state_[k] == kIn) x[k] = 1;
    }
    const double v = evaluate(inst_, x);
    if (v > best_value_) {
      best_value_ = v;
      best_x_ = std::move(x);
    }
  }

  void explore(double fixed_value, std::int64_t room) {
    if (out_of_time()) return;
    ++nodes_;
    const auto [relaxed, frac] = relax(room);
    if (fixed_value + relaxed <= best_value_) return;
    if (frac < 0) {
      accept_binary_relaxation(room);
      return;
    }
    const auto k = static_cast<std::size_t>(frac);
    if (inst_.weights[k] <= room) {
      state_[k] = kIn;
      explore(fixed_value + inst_.values[k], room - inst_.weights[k]);
    }
    state_[k] = kOut;
    explore(fixed_value, room);
    state_[k] = kFree;
  }

  const SpoInstance& inst_;
  std::vector<int> order_;
  std::vector<char> state_;
  std::chrono::steady_clock::time_point deadline_;
  std::vector<char> best_x_;
  double best_value_ = 0.0;
  double root_bound_ = 0.0;
  std::int64_t nodes_ = 0;
  bool timed_out_ = false;
};

}  // namespace

SpoSolution solve_bnb(const SpoInstance& inst, Seconds timeout) {
  inst.validate();
  if (!(timeout.count() > 0.0)) throw std::invalid_argument("solve_bnb: timeout must be positive");
  return BranchAndBound(inst, timeout).run();
}

SpoSolution solve_bruteforce(const SpoInstance& inst) {
  inst.validate();
  const int n = inst.num_items();
  if (n > kMaxBruteForceItems) {
    throw std::invalid_argument("solve_bruteforce: " + std::to_string(n) +
                                " items exceeds the limit of " +
                                std::to_string(kMaxBruteForceItems));
  }
  double scale = 0.0;
  for (double v : inst.values) scale += v;
  const double slack = 1e-9 * (scale + 1.0);

  // Walk subsets in Gray-code order; the running value only screens
  // candidates, the winner is decided on evaluate().
  std::vector<char> x(static_cast<std::size_t>(n), 0);
  std::vector<char> best = x;
  double best_value = 0.0;
  std::int64_t weight = 0;
  double running = 0.0;
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t g = 1; g < count; ++g) {
    const int bit = std::countr_zero(g);
    const auto k = static_cast<std::size_t>(bit);
    if (x[k]) {
      x[k] = 0;
      weight -= inst.weights[k];
      running -= inst.values[k];
    } else {
      x[k] = 1;
      weight += inst.weights[k];
      running += inst.values[k];
    }
    if (weight > inst.capacity || running < best_value - slack) continue;
    const double v = evaluate(inst, x);
    if (v > best_value) {
      best_value = v;
      best = x;
    }
  }
  SpoSolution s = finish(inst, std::move(best), SpoStatus::kOptimal);
  s.alpha_guarantee = 1.0;
  s.beta_guarantee = 1.0;
  return s;
}

double delta_bound(const Catalog& catalog, std::int64_t capacity, double gamma) {
  const auto s1 = static_cast<std::int64_t>(catalog.largest_size());
  if (capacity < s1) {
    throw std::invalid_argument("delta_bound: capacity below the largest file size");
  }
  const std::int64_t whole = capacity / s1;
  const std::int64_t ceil = (capacity + s1 - 1) / s1;
  double sum = 0.0;
  for (std::int64_t i = whole; i >= 1; --i) sum += std::pow(static_cast<double>(i), -gamma);
  const double ratio = static_cast<double>(s1) / catalog.smallest_size();
  return 1.0 + ratio * std::pow(static_cast<double>(ceil), -gamma) / sum;
}

}  // namespace edgecache
