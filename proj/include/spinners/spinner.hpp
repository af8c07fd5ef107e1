#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spinners/common.hpp"
#include "spinners/transforms.hpp"

#include <json.hpp>

namespace spinners {

/// The five structured variants of the spinner family plus the unstructured
/// Gaussian baseline they are measured against.
enum class SpinnerVariant {
  hd3_hd2_hd1,        // H D3 H D2 H D1, Rademacher diagonals
  hdg_hd2_hd1,        // H Dg H D2 H D1, Gaussian diagonal on top
  gcirc_d2_hd1,       // Gaussian circulant * D2 H D1
  gtoeplitz_d2_hd1,   // Gaussian Toeplitz * D2 H D1
  gskew_circ_d2_hd1,  // Gaussian skew-circulant * D2 H D1
  gaussian_dense,     // i.i.d. N(0,1) dense matrix
};

std::string to_string(SpinnerVariant v);
SpinnerVariant variant_from_string(const std::string& s);
std::vector<SpinnerVariant> all_variants();
std::vector<SpinnerVariant> structured_variants();

/// True for every variant whose input stage is H D1 (all but gaussian_dense).
bool has_hadamard(SpinnerVariant v);

/// Default scale: sqrt(n) for the Hadamard-only variants so their entry
/// variance matches the unit-variance Gaussian baseline; 1 otherwise (the
/// circulant-family generator already carries unit Gaussian variance).
double default_scale(SpinnerVariant v, std::size_t n);

struct SpinnerSpec {
  SpinnerVariant variant = SpinnerVariant::hd3_hd2_hd1;
  std::size_t n = 0;  // input dimension; power of two for Hadamard-bearing variants
  std::size_t m = 0;  // output rows, 1 <= m <= n
  std::uint64_t seed = 0;
  double scale = 0.0;  // 0 means "use default_scale"

  static SpinnerSpec make(SpinnerVariant v, std::size_t n, std::size_t m, std::uint64_t seed);
  void validate() const;
  double effective_scale() const;

  nlohmann::json to_json() const;
  static SpinnerSpec from_json(const nlohmann::json& j);
};

/// One realized m x n spinner block. Immutable after build; apply is pure.
class StructuredSpinner {
 public:
  static StructuredSpinner build(const SpinnerSpec& spec);

  /// Fast application of the (truncated, scaled) operator. O(n log n) for
  /// structured variants, O(mn) for the dense baseline.
  Vec64 apply(const Vec64& x) const;

  /// Column j equals apply(e_j); used as a test oracle and timing baseline.
  Eigen::MatrixXd to_dense() const;

  /// Redraw only the randomness of the last block (D3, Dg, the circulant
  /// generator, or the whole matrix for the dense baseline) keeping M1, M2.
  StructuredSpinner resample_last_block(std::uint64_t tail_seed) const;

  /// Redraw everything after the first block: D2 plus the last block's
  /// randomness. M1, the balancedness block, stays fixed.
  StructuredSpinner resample_tail(std::uint64_t tail_seed) const;

  /// Replace the last-block parameter vector (D3 or Dg diagonal) with r.
  /// Only valid for the Hadamard-only variants; used by the adaptive fit.
  StructuredSpinner with_tail_vector(Vec64 r) const;

  const SpinnerSpec& spec() const { return spec_; }
  std::size_t input_dim() const { return spec_.n; }
  std::size_t rows() const { return spec_.m; }

  // Realized state, exposed for oracles and diagnostics.
  const Vec64& d1() const { return d1_; }
  const Vec64& d2() const { return d2_; }
  const Vec64& d3() const { return d3_; }
  const Vec64& g_diag() const { return g_diag_; }
  const std::optional<CirculantOperator>& generator() const { return generator_; }
  const Eigen::MatrixXd& dense() const { return dense_; }

  /// M2 M1 x for Hadamard-bearing variants (the input to the last block).
  Vec64 apply_front_blocks(const Vec64& x) const;

 private:
  StructuredSpinner() = default;
  void draw_tail(Rng& rng);

  SpinnerSpec spec_;
  Vec64 d1_, d2_;
  Vec64 d3_;      // hd3_hd2_hd1
  Vec64 g_diag_;  // hdg_hd2_hd1
  std::optional<CirculantOperator> generator_;
  Eigen::MatrixXd dense_;
};

/// k x n operator formed by stacking independently seeded m-row blocks;
/// the last block is truncated when m does not divide k.
class StackedSpinner {
 public:
  StackedSpinner(SpinnerVariant variant, std::size_t n, std::size_t m, std::size_t k,
                 std::uint64_t seed);
  StackedSpinner(std::vector<StructuredSpinner> blocks, std::size_t k);

  Vec64 apply(const Vec64& x) const;

  std::size_t rows() const { return k_; }
  std::size_t input_dim() const;
  const std::vector<StructuredSpinner>& blocks() const { return blocks_; }

 private:
  std::vector<StructuredSpinner> blocks_;
  std::size_t k_;
};

struct FitResult {
  Vec64 r;          // last-block parameter vector, length n
  double residual;  // max_i || spinner(r) x_i - target x_i ||_2
  StructuredSpinner fitted;
};

/// Solve for the last-block vector r so that the spinner with the
/// prototype's M1, M2 matches `target` (m x n) on span(basis). The basis
/// vectors must be orthonormal and m*d <= n must hold. Rank deficiency of
/// the m*d x n system raises SingularSystemError.
FitResult fit_to_target(const StructuredSpinner& prototype, const Eigen::MatrixXd& target,
                        const std::vector<Vec64>& basis);

}  // namespace spinners
