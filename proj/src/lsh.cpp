#include "spinners/lsh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spinners {

SignedIndex signed_argmax(const Vec64& y) {
  if (y.empty()) throw DimensionError("signed_argmax: empty vector");
  std::size_t best = 0;
  double best_abs = std::abs(y[0]);
  for (std::size_t i = 1; i < y.size(); ++i) {
    const double a = std::abs(y[i]);
    if (a > best_abs) {
      best_abs = a;
      best = i;
    }
  }
  return SignedIndex{best, y[best] < 0.0 ? -1 : 1};
}

SignedIndex CrossPolytopeHasher::hash(const Vec64& x) const {
  check_finite(x, "CrossPolytopeHasher::hash");
  bool zero = true;
  for (double v : x)
    if (v != 0.0) { zero = false; break; }
  if (zero) throw DomainError("CrossPolytopeHasher::hash: zero vector");
  return signed_argmax(projector_.apply(x));
}

HasherFactory make_hasher_factory(SpinnerVariant variant, std::size_t n, std::size_t m) {
  return [variant, n, m](std::uint64_t seed) {
    return CrossPolytopeHasher(StackedSpinner(variant, n, std::min(m, n), m, seed));
  };
}

CollisionCurve collision_curve(const std::vector<HashedPair>& pairs,
                               const HasherFactory& factory, std::size_t trials,
                               std::uint64_t seed, std::size_t buckets, double max_distance) {
  if (trials < 1) throw DimensionError("collision_curve: trials must be >= 1");
  if (buckets < 1) throw DimensionError("collision_curve: need at least one bucket");

  std::vector<std::size_t> bucket_of(pairs.size());
  const double width = max_distance / static_cast<double>(buckets);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const double d = pairs[p].distance;
    if (d < 0.0 || !std::isfinite(d))
      throw DomainError("collision_curve: distances must be finite and nonnegative");
    std::size_t b = static_cast<std::size_t>(d / width);
    bucket_of[p] = std::min(b, buckets - 1);
  }

  std::vector<std::size_t> counts(buckets, 0), hits(buckets, 0);
  for (std::size_t t = 0; t < trials; ++t) {
    CrossPolytopeHasher hasher = factory(mix_seed(seed, t));
    for (std::size_t p = 0; p < pairs.size(); ++p) {
      counts[bucket_of[p]]++;
      if (hasher.hash(pairs[p].x) == hasher.hash(pairs[p].y)) hits[bucket_of[p]]++;
    }
  }

  CollisionCurve curve;
  curve.bucket_edges.resize(buckets + 1);
  for (std::size_t b = 0; b <= buckets; ++b)
    curve.bucket_edges[b] = width * static_cast<double>(b);
  curve.counts = counts;
  curve.probabilities.resize(buckets);
  for (std::size_t b = 0; b < buckets; ++b)
    curve.probabilities[b] = counts[b] == 0
                                 ? std::numeric_limits<double>::quiet_NaN()
                                 : static_cast<double>(hits[b]) / static_cast<double>(counts[b]);
  return curve;
}

FamilyComparison compare_families(const std::vector<HashedPair>& pairs,
                                  const HasherFactory& family_a, const HasherFactory& family_b,
                                  std::size_t trials, std::uint64_t seed_a, std::uint64_t seed_b,
                                  std::size_t buckets, double max_distance) {
  FamilyComparison cmp;
  cmp.curve_a = collision_curve(pairs, family_a, trials, seed_a, buckets, max_distance);
  cmp.curve_b = collision_curve(pairs, family_b, trials, seed_b, buckets, max_distance);
  cmp.bucket_differences.resize(buckets);
  cmp.sup_difference = 0.0;
  for (std::size_t b = 0; b < buckets; ++b) {
    const double pa = cmp.curve_a.probabilities[b];
    const double pb = cmp.curve_b.probabilities[b];
    if (std::isnan(pa) || std::isnan(pb)) {
      cmp.bucket_differences[b] = std::numeric_limits<double>::quiet_NaN();
    } else {
      cmp.bucket_differences[b] = std::abs(pa - pb);
      cmp.sup_difference = std::max(cmp.sup_difference, cmp.bucket_differences[b]);
    }
  }
  return cmp;
}

}  // namespace spinners
