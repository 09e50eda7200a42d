#include "edgecache/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace edgecache {

Catalog::Catalog(std::vector<int> sizes, std::vector<int> file_ids)
    : sizes_(std::move(sizes)), file_ids_(std::move(file_ids)) {
  if (sizes_.empty()) throw std::invalid_argument("catalog has no files");
  if (file_ids_.size() != sizes_.size()) {
    throw std::invalid_argument("catalog: one file id per file required");
  }
  for (int s : sizes_) {
    if (s <= 0) throw std::invalid_argument("catalog: file sizes must be positive");
    total_size_ += s;
  }
  size_classes_ = sizes_;
  std::sort(size_classes_.begin(), size_classes_.end(), std::greater<>());
  size_classes_.erase(std::unique(size_classes_.begin(), size_classes_.end()),
                      size_classes_.end());
}

Catalog build_catalog(std::span<const SizeClass> classes,
                      SizeAssignment assignment, std::uint64_t seed) {
  if (classes.empty()) throw std::invalid_argument("empty size class list");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    if (classes[i].size <= 0 || classes[i].count <= 0) {
      throw std::invalid_argument("size classes need positive size and count");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (classes[j].size == classes[i].size) {
        throw std::invalid_argument("duplicate size class " +
                                    std::to_string(classes[i].size));
      }
    }
  }

  std::vector<int> remaining;
  int num_files = 0;
  for (const auto& c : classes) {
    remaining.push_back(c.count);
    num_files += c.count;
  }

  std::vector<int> sizes;
  sizes.reserve(static_cast<std::size_t>(num_files));
  std::size_t k = 0;
  while (static_cast<int>(sizes.size()) < num_files) {
    if (remaining[k] > 0) {
      sizes.push_back(classes[k].size);
      --remaining[k];
    }
    k = (k + 1) % classes.size();
  }

  Rng rng(derive_seed(seed, 0));
  if (assignment == SizeAssignment::kRandom) rng.shuffle(std::span<int>(sizes));

  std::vector<int> ids(static_cast<std::size_t>(num_files));
  std::iota(ids.begin(), ids.end(), 0);
  rng.shuffle(std::span<int>(ids));
  return Catalog(std::move(sizes), std::move(ids));
}

PopularityProfile zipf_profile(int num_files, double gamma, int users) {
  if (num_files < 1) throw std::invalid_argument("zipf_profile: F must be >= 1");
  if (!(gamma >= 0.0)) throw std::invalid_argument("zipf_profile: gamma must be >= 0");
  if (users < 1) throw std::invalid_argument("zipf_profile: U must be >= 1");

  const auto n = static_cast<std::size_t>(num_files);
  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) {
    weight[i] = std::pow(static_cast<double>(i + 1), -gamma);
  }
  // Smallest terms first.
  double norm = 0.0;
  for (std::size_t i = n; i-- > 0;) norm += weight[i];

  PopularityProfile p;
  p.gamma = gamma;
  p.users = users;
  p.theta.resize(n);
  p.probs.resize(n);
  p.cdf.resize(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    p.probs[i] = weight[i] / norm;
    p.theta[i] = users * p.probs[i];
    acc += p.probs[i];
    p.cdf[i] = acc;
  }
  p.cdf.back() = 1.0;
  p.guide.resize(n);
  std::size_t i = 0;
  for (std::size_t b = 0; b < n; ++b) {
    const double edge = static_cast<double>(b) / static_cast<double>(n);
    while (i + 1 < n && p.cdf[i] <= edge) ++i;
    p.guide[b] = static_cast<int>(i);
  }
  return p;
}

void sample_demands(const PopularityProfile& profile, Rng& rng,
                    DemandVector& out) {
  out.counts.assign(profile.theta.size(), 0);
  if (profile.cdf.size() == 1) {
    out.counts[0] = profile.users;
    return;
  }
  const auto& cdf = profile.cdf;
  const std::size_t last = cdf.size() - 1;
  const bool guided = profile.guide.size() == cdf.size();
  for (int u = 0; u < profile.users; ++u) {
    const double x = rng.uniform();
    std::size_t f;
    if (guided) {
      // Same answer as upper_bound, clamped to the last file.
      const auto b = std::min(last, static_cast<std::size_t>(x * static_cast<double>(cdf.size())));
      f = static_cast<std::size_t>(profile.guide[b]);
      while (f > 0 && cdf[f - 1] > x) --f;
      while (f < last && cdf[f] <= x) ++f;
    } else {
      const auto it = std::upper_bound(cdf.begin(), cdf.end(), x);
      f = std::min(static_cast<std::size_t>(it - cdf.begin()), last);
    }
    ++out.counts[f];
  }
}

DemandVector sample_demands(const PopularityProfile& profile, Rng& rng) {
  DemandVector d;
  sample_demands(profile, rng, d);
  return d;
}

}  // namespace edgecache
