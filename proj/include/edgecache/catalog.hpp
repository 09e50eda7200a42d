#ifndef EDGECACHE_CATALOG_HPP
#define EDGECACHE_CATALOG_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "edgecache/random.hpp"

namespace edgecache {

/// A group of `count` files sharing one size (in storage units).
struct SizeClass {
  int size = 0;
  int count = 0;

  bool operator==(const SizeClass&) const = default;
};

/// How popularity ranks are mapped to size classes.
enum class SizeAssignment {
  kRoundRobin,  // rank r takes the next class with files left, cycling
  kRandom,      // sizes shuffled over ranks under the catalog seed
};

/// The file universe.
///
/// File index f (0-based) is also the popularity rank: index 0 is the most
/// popular file. `file_id(f)` gives an opaque identifier drawn from a seeded
/// permutation so that nothing downstream can key on the rank itself.
class Catalog {
 public:
  Catalog(std::vector<int> sizes, std::vector<int> file_ids);

  int num_files() const { return static_cast<int>(sizes_.size()); }
  int size(int f) const { return sizes_[static_cast<std::size_t>(f)]; }
  std::span<const int> sizes() const { return sizes_; }
  int file_id(int f) const { return file_ids_[static_cast<std::size_t>(f)]; }
  std::span<const int> file_ids() const { return file_ids_; }

  /// Distinct sizes, strictly decreasing.
  const std::vector<int>& size_classes() const { return size_classes_; }
  int largest_size() const { return size_classes_.front(); }
  int smallest_size() const { return size_classes_.back(); }
  std::int64_t total_size() const { return total_size_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> file_ids_;
  std::vector<int> size_classes_;
  std::int64_t total_size_ = 0;
};

/// Throws std::invalid_argument on an empty class list, a non-positive size
/// or count, or repeated sizes.
Catalog build_catalog(std::span<const SizeClass> classes,
                      SizeAssignment assignment = SizeAssignment::kRoundRobin,
                      std::uint64_t seed = 0);

/// Zipf popularity over F files with skewness gamma and U users.
struct PopularityProfile {
  double gamma = 0.0;
  int users = 0;
  std::vector<double> theta;  // expected requests per period, by rank
  std::vector<double> probs;  // theta / users
  std::vector<double> cdf;    // running sum of probs, last entry forced to 1
  // guide[b] is the first index whose cdf exceeds b / guide.size(); optional,
  // it only shortens the search in sample_demands.
  std::vector<int> guide;

  int num_files() const { return static_cast<int>(theta.size()); }
};

PopularityProfile zipf_profile(int num_files, double gamma, int users);

/// Requests per file in one period.
struct DemandVector {
  std::vector<int> counts;
};

/// Each of the U users independently requests one file drawn from
/// `profile.probs`; the result is the multinomial tally.
DemandVector sample_demands(const PopularityProfile& profile, Rng& rng);

/// Same as above, reusing `out` to avoid reallocating every period.
void sample_demands(const PopularityProfile& profile, Rng& rng,
                    DemandVector& out);

}  // namespace edgecache

#endif  // EDGECACHE_CATALOG_HPP
