#include "spinners/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace spinners {

namespace {

using cd = std::complex<double>;

// Iterative radix-2 Cooley-Tukey. Forward uses e^{-2pi i jk/n}; inverse
// applies the 1/n scale. Length must be a power of two.
void fft_inplace(std::vector<cd>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * M_PI / static_cast<double>(len);
    const cd wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cd w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        cd u = a[i + k];
        cd v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse) {
    const double inv = 1.0 / static_cast<double>(n);
    for (auto& z : a) z *= inv;
  }
}

std::vector<cd> fft_of_real(const Vec64& x, std::size_t len) {
  std::vector<cd> a(len, cd(0.0, 0.0));
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = cd(x[i], 0.0);
  fft_inplace(a, false);
  return a;
}

}  // namespace

Vec64 fwht_normalized(Vec64 x) {
  const std::size_t n = x.size();
  if (!is_power_of_two(n))
    throw DimensionError("fwht_normalized: length must be a power of two, got " +
                         std::to_string(n));
  check_finite(x, "fwht_normalized");
  for (std::size_t h = 1; h < n; h <<= 1) {
    for (std::size_t i = 0; i < n; i += h << 1) {
      for (std::size_t j = i; j < i + h; ++j) {
        double u = x[j];
        double v = x[j + h];
        x[j] = u + v;
        x[j + h] = u - v;
      }
    }
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (double& v : x) v *= scale;
  return x;
}

CirculantSpec CirculantSpec::circulant(Vec64 r) {
  CirculantSpec s;
  s.kind = CirculantKind::circulant;
  s.first_row = std::move(r);
  s.validate();
  return s;
}

CirculantSpec CirculantSpec::toeplitz(Vec64 col, Vec64 row) {
  CirculantSpec s;
  s.kind = CirculantKind::toeplitz;
  s.first_col = std::move(col);
  s.first_row = std::move(row);
  s.validate();
  return s;
}

CirculantSpec CirculantSpec::skew_circulant(Vec64 r) {
  CirculantSpec s;
  s.kind = CirculantKind::skew_circulant;
  s.first_row = std::move(r);
  s.validate();
  return s;
}

void CirculantSpec::validate() const {
  if (first_row.empty()) throw DimensionError("CirculantSpec: n must be >= 1");
  check_finite(first_row, "CirculantSpec.first_row");
  if (kind == CirculantKind::toeplitz) {
    if (first_col.size() != first_row.size())
      throw DimensionError("CirculantSpec: toeplitz first_col/first_row length mismatch");
    check_finite(first_col, "CirculantSpec.first_col");
    if (first_col[0] != first_row[0])
      throw DomainError("CirculantSpec: toeplitz corner entry mismatch");
  } else if (!first_col.empty()) {
    throw DimensionError("CirculantSpec: first_col only valid for toeplitz");
  }
}

CirculantOperator::CirculantOperator(CirculantSpec spec) : spec_(std::move(spec)) {
  spec_.validate();
  const std::size_t n = spec_.dim();
  switch (spec_.kind) {
    case CirculantKind::circulant: {
      direct_ = is_power_of_two(n);
      fft_len_ = direct_ ? n : next_power_of_two(2 * n);
      spectrum_ = fft_of_real(spec_.first_row, fft_len_);
      for (auto& z : spectrum_) z = std::conj(z);
      break;
    }
    case CirculantKind::toeplitz: {
      // Embed T into a power-of-two circulant: C[i][j] = r_emb[(j-i) mod N]
      // reproduces t_{i-j} on the top-left n x n corner.
      direct_ = true;
      fft_len_ = 2 * next_power_of_two(n);
      Vec64 r_emb(fft_len_, 0.0);
      for (std::size_t k = 0; k < n; ++k) r_emb[k] = spec_.first_row[k];
      for (std::size_t k = 1; k < n; ++k) r_emb[fft_len_ - k] = spec_.first_col[k];
      spectrum_ = fft_of_real(r_emb, fft_len_);
      for (auto& z : spectrum_) z = std::conj(z);
      break;
    }
    case CirculantKind::skew_circulant: {
      direct_ = is_power_of_two(n);
      if (direct_) {
        fft_len_ = n;
        // Half-root-of-unity weighting turns negacyclic correlation into
        // cyclic correlation: y_i = w^{-i} sum_k (r_k w^{-k}) X_{(i+k) mod n}
        // with w = e^{i pi / n} and X_j = x_j w^j.
        twiddle_.resize(n);
        untwiddle_.resize(n);
        std::vector<cd> weighted(n);
        for (std::size_t k = 0; k < n; ++k) {
          const double ang = M_PI * static_cast<double>(k) / static_cast<double>(n);
          twiddle_[k] = cd(std::cos(ang), std::sin(ang));
          untwiddle_[k] = std::conj(twiddle_[k]);
          // conj(FFT(conj(A))) with A_k = r_k w^{-k}: transform r_k w^{+k}.
          weighted[k] = spec_.first_row[k] * twiddle_[k];
        }
        spectrum_ = weighted;
        fft_inplace(spectrum_, false);
        for (auto& z : spectrum_) z = std::conj(z);
      } else {
        fft_len_ = next_power_of_two(2 * n);
        spectrum_ = fft_of_real(spec_.first_row, fft_len_);
        for (auto& z : spectrum_) z = std::conj(z);
      }
      break;
    }
  }
}

Vec64 CirculantOperator::apply(const Vec64& x) const {
  const std::size_t n = spec_.dim();
  if (x.size() != n)
    throw DimensionError("CirculantOperator::apply: expected length " + std::to_string(n) +
                         ", got " + std::to_string(x.size()));
  check_finite(x, "CirculantOperator::apply");

  std::vector<cd> b(fft_len_, cd(0.0, 0.0));
  switch (spec_.kind) {
    case CirculantKind::circulant:
      if (direct_) {
        for (std::size_t i = 0; i < n; ++i) b[i] = cd(x[i], 0.0);
      } else {
        // Cyclic correlation via zero-padded linear correlation against the
        // periodic extension of x.
        for (std::size_t i = 0; i < n; ++i) b[i] = cd(x[i], 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) b[n + i] = cd(x[i], 0.0);
      }
      break;
    case CirculantKind::toeplitz:
      for (std::size_t i = 0; i < n; ++i) b[i] = cd(x[i], 0.0);
      break;
    case CirculantKind::skew_circulant:
      if (direct_) {
        for (std::size_t i = 0; i < n; ++i) b[i] = x[i] * twiddle_[i];
      } else {
        for (std::size_t i = 0; i < n; ++i) b[i] = cd(x[i], 0.0);
        for (std::size_t i = 0; i + 1 < n; ++i) b[n + i] = cd(-x[i], 0.0);
      }
      break;
  }

  fft_inplace(b, false);
  for (std::size_t j = 0; j < fft_len_; ++j) b[j] *= spectrum_[j];
  fft_inplace(b, true);

  Vec64 y(n);
  if (spec_.kind == CirculantKind::skew_circulant && direct_) {
    for (std::size_t i = 0; i < n; ++i) y[i] = (b[i] * untwiddle_[i]).real();
  } else {
    for (std::size_t i = 0; i < n; ++i) y[i] = b[i].real();
  }
  return y;
}

Vec64 circulant_matvec(const CirculantSpec& spec, const Vec64& x) {
  if (spec.kind != CirculantKind::circulant)
    throw DomainError("circulant_matvec: spec is not circulant");
  return CirculantOperator(spec).apply(x);
}

Vec64 toeplitz_matvec(const CirculantSpec& spec, const Vec64& x) {
  if (spec.kind != CirculantKind::toeplitz)
    throw DomainError("toeplitz_matvec: spec is not toeplitz");
  return CirculantOperator(spec).apply(x);
}

Vec64 skew_circulant_matvec(const CirculantSpec& spec, const Vec64& x) {
  if (spec.kind != CirculantKind::skew_circulant)
    throw DomainError("skew_circulant_matvec: spec is not skew-circulant");
  return CirculantOperator(spec).apply(x);
}

Vec64 diag_matvec(const Vec64& d, const Vec64& x) {
  check_same_length(d, x, "diag_matvec");
  check_finite(d, "diag_matvec.d");
  check_finite(x, "diag_matvec.x");
  Vec64 y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = d[i] * x[i];
  return y;
}

}  // namespace spinners
