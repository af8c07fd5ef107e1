#pragma once

#include <string>
#include <vector>

#include "spinners/common.hpp"

namespace spinners {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Uniform-dimension sample collection with optional +-1 labels.
struct Dataset {
  std::vector<Vec64> rows;
  std::vector<int> labels;  // empty when unlabeled
  std::string provenance;

  std::size_t dim() const { return rows.empty() ? 0 : rows.front().size(); }
  std::size_t size() const { return rows.size(); }
};

/// Comma-separated decimal floats, one sample per line. When
/// last_column_label is set, the final column must hold integer +-1 labels.
Dataset load_csv(const std::string& path, bool last_column_label = false);

void save_csv(const Dataset& data, const std::string& path);

/// Unit-vector pairs at the prescribed angles: rows 2p and 2p+1 form a pair.
/// Pair distance is 2 sin(theta/2) on the unit sphere.
Dataset synth_unit_sphere_pairs(std::size_t dim, const std::vector<double>& angles,
                                std::size_t pairs_per_angle, std::uint64_t seed);

/// count i.i.d. N(0, I_dim) samples.
Dataset synth_gaussian_blob(std::size_t dim, std::size_t count, std::uint64_t seed);

/// AR(1) logistic data as a dataset: rows from N(0, Sigma) with
/// Sigma_{ij} = 0.99^{|i-j|}, labels i.i.d. uniform +-1.
Dataset synth_ar1(std::size_t n, std::size_t d, std::uint64_t seed);

/// Zero-pad every row to the next power of two (for Hadamard variants).
Dataset pad_to_power_of_two(Dataset data);

}  // namespace spinners
