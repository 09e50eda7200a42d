#ifndef EDGECACHE_SPO_HPP
#define EDGECACHE_SPO_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <string_view>
#include <span>
#include <vector>

#include "edgecache/catalog.hpp"

namespace edgecache {

// Single-period placement problem: a 0/1 knapsack with real values and
// integer weights,
//
//   maximize   sum_f values[f] * x[f]
//   subject to sum_f weights[f] * x[f] <= capacity,  x[f] in {0, 1}.
//
// With known popularity, values[f] = theta_f * S_f and weights[f] = S_f, so
// the value density of file f is theta_f.

struct SpoInstance {
  std::vector<double> values;
  std::vector<int> weights;
  std::int64_t capacity = 0;

  int num_items() const { return static_cast<int>(values.size()); }

  /// Throws std::invalid_argument unless lengths match, weights are positive,
  /// values are nonnegative and capacity is nonnegative.
  void validate() const;
};

/// Placement instance for the true profile: values theta_f * S_f.
SpoInstance make_instance(const Catalog& catalog,
                          const PopularityProfile& profile,
                          std::int64_t capacity);

/// Optimum of the LP relaxation (0 <= x <= 1).
struct FractionalSolution {
  std::vector<double> x;
  double value = 0.0;
  std::optional<int> frac_index;  // the single item with 0 < x < 1
  std::optional<double> beta;     // its fill level
};

enum class SpoStatus { kOptimal, kApproximate, kTimeoutIncumbent };

std::string_view to_string(SpoStatus status);

struct SpoSolution {
  std::vector<char> x;  // 0/1 per item
  double value = 0.0;
  std::int64_t weight = 0;
  SpoStatus status = SpoStatus::kApproximate;
  // Certified fraction of the optimum reached, and the probability with
  // which that certificate holds.
  double alpha_guarantee = 0.0;
  double beta_guarantee = 1.0;
  std::int64_t nodes = 0;  // branch-and-bound nodes visited, 0 otherwise

  std::vector<int> selected() const;
};

/// Item indices by decreasing value density; ties go to the lower index.
std::vector<int> density_order(const SpoInstance& inst);

/// Sum of values[f] over chosen items, accumulated in index order. Every
/// solver reports its value through this so equal sets compare equal.
double evaluate(const SpoInstance& inst, const std::vector<char>& x);

/// Fill items in density order; the first item that does not fit is taken
/// fractionally and the rest are left out.
FractionalSolution solve_lp(const SpoInstance& inst);

enum class GreedyVariant {
  kFloorLp,          // LP prefix with the fractional item dropped
  kSkipAndContinue,  // keep scanning past items that do not fit
};

/// Greedy approximation. The default is the floor of the LP optimum.
/// alpha_guarantee is value / LP value, which bounds the gap to the optimum.
SpoSolution solve_greedy(const SpoInstance& inst,
                         GreedyVariant variant = GreedyVariant::kFloorLp);

/// The indices solve_greedy would pick, ascending. Skips validation and the
/// value/guarantee bookkeeping; meant for per-period solves on trusted input.
std::vector<int> greedy_pick(std::span<const double> values, std::span<const int> weights,
                             std::int64_t capacity,
                             GreedyVariant variant = GreedyVariant::kFloorLp);

using Seconds = std::chrono::duration<double>;

inline constexpr Seconds kDefaultBnbTimeout{50.0};

/// Depth-first branch and bound. Starts from the greedy incumbent, bounds
/// each node by the LP relaxation of the free items, branches on the
/// fractional item (include before exclude), and prunes nodes whose bound
/// does not beat the incumbent. On timeout the incumbent is returned with
/// status kTimeoutIncumbent.
SpoSolution solve_bnb(const SpoInstance& inst, Seconds timeout = kDefaultBnbTimeout);

inline constexpr int kMaxBruteForceItems = 25;

/// Exhaustive search. Throws std::invalid_argument above kMaxBruteForceItems.
SpoSolution solve_bruteforce(const SpoInstance& inst);

/// Upper bound on optimum / greedy value for Zipf-skewed values
/// theta_f * S_f with skewness `gamma`:
///
///   1 + (s_1 / s_min) * ceil(M / s_1)^-gamma / sum_{i=1}^{floor(M / s_1)} i^-gamma
///
/// where s_1 is the largest and s_min the smallest file size. Requires
/// M >= s_1, otherwise throws std::invalid_argument.
double delta_bound(const Catalog& catalog, std::int64_t capacity, double gamma);

}  // namespace edgecache

#endif  // EDGECACHE_SPO_HPP
