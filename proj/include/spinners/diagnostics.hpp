#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spinners/common.hpp"
#include "spinners/spinner.hpp"

namespace spinners {

struct BalancednessReport {
  std::size_t n = 0;
  double delta = 0.0;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  double empirical_rate = 0.0;  // fraction of trials with ||H D1 x||_inf > delta/sqrt(n)
  double theory_bound = 0.0;    // min(1, 2 n e^{-delta^2/8})
};

/// Samples a fresh Rademacher D1 and a fresh random unit vector per trial and
/// measures how often the rotated vector's max-norm exceeds delta/sqrt(n).
/// Pass a negative delta to use the default ln(n); delta == 0 is legitimate.
BalancednessReport balancedness_rate(std::size_t n, double delta, std::size_t trials,
                                     std::uint64_t seed);

struct CovarianceReport {
  std::size_t m = 0;
  std::size_t d = 0;
  std::size_t resamples = 0;
  Eigen::MatrixXd covariance;      // md x md, empirical
  double max_off_diagonal = 0.0;
  double max_diag_deviation = 0.0;  // max |cov_ii - 1|
};

/// Fixes M1 from the seed, resamples the randomness of the remaining blocks
/// (D2 plus the last block) per trial, and estimates the covariance of the
/// stacked projection of d orthonormal basis vectors. Near-identity
/// covariance is the measurable face of the structured-vs-Gaussian closeness
/// claim. Resampling the last block alone would leave a fixed off-diagonal
/// bias of order 1/sqrt(n) (the XOR autocorrelation of the rotated basis),
/// which is not the quantity the closeness claim is about.
CovarianceReport projection_covariance(SpinnerVariant variant, std::size_t n, std::size_t m,
                                       const std::vector<Vec64>& basis, std::size_t resamples,
                                       std::uint64_t seed);

/// Two-sample Kolmogorov-Smirnov statistic.
double ks_distance(std::vector<double> samples_a, std::vector<double> samples_b);

struct BenchRow {
  std::size_t n = 0;
  double structured_ns = 0.0;
  double dense_ns = 0.0;
  double speedup = 0.0;  // dense / structured
};

/// Single-threaded median per-matvec wall clock of the structured apply
/// against a naive (non-BLAS) dense matvec of equal dimensions, construction
/// time excluded. Rows of the dense baseline cycle through a buffer capped
/// at ~512 MB so the largest sizes fit in memory; the working set still
/// exceeds cache, keeping the measurement memory-realistic.
std::vector<BenchRow> bench_matvec(SpinnerVariant variant, const std::vector<std::size_t>& sizes,
                                   std::size_t reps, std::uint64_t seed);

/// Least-squares slope of log(time) against log(n); used for the
/// quasi-linear-vs-quadratic scaling checks.
double log_log_slope(const std::vector<std::size_t>& sizes, const std::vector<double>& times);

}  // namespace spinners
