#pragma once

#include <functional>
#include <tuple>
#include <vector>

#include "spinners/common.hpp"
#include "spinners/spinner.hpp"

namespace spinners {

/// Signed canonical direction +-e_index: the cross-polytope hash value.
struct SignedIndex {
  std::size_t index = 0;
  int sign = 1;
  bool operator==(const SignedIndex&) const = default;
};

/// The signed-argmax rule: argmax_i |y_i| with the sign of that coordinate.
/// Ties break toward the smallest index; sign(0) := +1.
SignedIndex signed_argmax(const Vec64& y);

/// Signed-argmax hash over a spinner rotation. Immutable, reentrant.
class CrossPolytopeHasher {
 public:
  explicit CrossPolytopeHasher(StackedSpinner projector) : projector_(std::move(projector)) {}

  /// argmax_i |y_i| of the projection, with the sign of that coordinate;
  /// ties break toward the smallest index, sign(0) := +1.
  SignedIndex hash(const Vec64& x) const;

  const StackedSpinner& projector() const { return projector_; }

 private:
  StackedSpinner projector_;
};

/// One (x, y) pair with its precomputed distance (Euclidean, on
/// unit-normalized inputs).
struct HashedPair {
  Vec64 x;
  Vec64 y;
  double distance = 0.0;
};

struct CollisionCurve {
  std::vector<double> bucket_edges;      // size buckets+1, increasing
  std::vector<double> probabilities;     // NaN where a bucket saw no pairs
  std::vector<std::size_t> counts;       // (pair, trial) events per bucket
};

using HasherFactory = std::function<CrossPolytopeHasher(std::uint64_t seed)>;

/// Standard factory for the collision experiments: one stacked spinner of
/// the given variant with m output rows.
HasherFactory make_hasher_factory(SpinnerVariant variant, std::size_t n, std::size_t m);

/// Fraction of (pair, trial) events with hash(x) == hash(y) per distance
/// bucket. Hashers are drawn independently per trial from (seed, trial).
/// Buckets are equal-width over [0, 2] by default.
CollisionCurve collision_curve(const std::vector<HashedPair>& pairs,
                               const HasherFactory& factory, std::size_t trials,
                               std::uint64_t seed, std::size_t buckets = 25,
                               double max_distance = 2.0);

struct FamilyComparison {
  CollisionCurve curve_a;
  CollisionCurve curve_b;
  std::vector<double> bucket_differences;  // NaN where either side is empty
  double sup_difference = 0.0;             // max over buckets defined on both sides
};

FamilyComparison compare_families(const std::vector<HashedPair>& pairs,
                                  const HasherFactory& family_a, const HasherFactory& family_b,
                                  std::size_t trials, std::uint64_t seed_a, std::uint64_t seed_b,
                                  std::size_t buckets = 25, double max_distance = 2.0);

}  // namespace spinners
