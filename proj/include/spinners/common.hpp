#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace spinners {

/// Dense real vector, the common currency of every transform in this library.
using Vec64 = std::vector<double>;

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Thrown by the adaptive fit and the sketched Newton step when a linear
/// system turns out rank-deficient or indefinite.
struct SingularSystemError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline bool is_power_of_two(std::size_t n) { return n >= 1 && (n & (n - 1)) == 0; }

inline std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

inline void check_finite(const Vec64& x, const char* what) {
  for (double v : x) {
    if (!std::isfinite(v)) throw DomainError(std::string(what) + ": non-finite entry");
  }
}

inline void check_same_length(const Vec64& a, const Vec64& b, const char* what) {
  if (a.size() != b.size())
    throw DimensionError(std::string(what) + ": length mismatch (" +
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
}

/// splitmix64 step; used to derive decorrelated per-block / per-trial seeds
/// from a single base seed.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Deterministic random source. The Gaussian path is Box-Muller on top of
/// mt19937_64 so that realized operators are bit-identical across compilers
/// (std::normal_distribution is implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in (0, 1].
  double uniform01() {
    return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1p-53;
  }

  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u = uniform01();
    double v = uniform01();
    double rad = std::sqrt(-2.0 * std::log(u));
    double ang = 2.0 * M_PI * v;
    spare_ = rad * std::sin(ang);
    have_spare_ = true;
    return rad * std::cos(ang);
  }

  double rademacher() { return (eng_() & 1) ? 1.0 : -1.0; }

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spinners
