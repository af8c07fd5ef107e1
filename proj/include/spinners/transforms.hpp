#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "spinners/common.hpp"

namespace spinners {

/// Normalized fast Walsh-Hadamard transform: returns H*x with H orthonormal.
/// Requires power-of-two length. O(n log n) time, works in place on the copy.
Vec64 fwht_normalized(Vec64 x);

enum class CirculantKind { circulant, toeplitz, skew_circulant };

/// Generating data for a circulant-family matrix.
///   circulant:      row i is first_row cyclically right-shifted by i,
///                   i.e. C[i][j] = r[(j - i) mod n].
///   toeplitz:       T[i][j] = t[i-j], first_col for i >= j, first_row for i < j.
///   skew_circulant: S[i][j] = r[j-i] for j >= i and -r[n+j-i] for j < i
///                   (negacyclic wraparound).
struct CirculantSpec {
  CirculantKind kind = CirculantKind::circulant;
  Vec64 first_row;
  Vec64 first_col;  // toeplitz only; first_col[0] must equal first_row[0]

  static CirculantSpec circulant(Vec64 r);
  static CirculantSpec toeplitz(Vec64 col, Vec64 row);
  static CirculantSpec skew_circulant(Vec64 r);

  std::size_t dim() const { return first_row.size(); }
  void validate() const;
};

/// A circulant-family matrix with its FFT spectrum computed once at
/// construction. Immutable after build; apply is pure and O(n log n).
class CirculantOperator {
 public:
  explicit CirculantOperator(CirculantSpec spec);

  Vec64 apply(const Vec64& x) const;
  const CirculantSpec& spec() const { return spec_; }

 private:
  CirculantSpec spec_;
  std::size_t fft_len_;
  bool direct_;  // power-of-two fast path (no padding)
  std::vector<std::complex<double>> spectrum_;
  std::vector<std::complex<double>> twiddle_;      // skew-circulant pre-weights
  std::vector<std::complex<double>> untwiddle_;    // skew-circulant post-weights
};

Vec64 circulant_matvec(const CirculantSpec& spec, const Vec64& x);
Vec64 toeplitz_matvec(const CirculantSpec& spec, const Vec64& x);
Vec64 skew_circulant_matvec(const CirculantSpec& spec, const Vec64& x);

/// Elementwise product d .* x.
Vec64 diag_matvec(const Vec64& d, const Vec64& x);

}  // namespace spinners
