#pragma once

#include <Eigen/Dense>
#include <vector>

#include "spinners/common.hpp"
#include "spinners/spinner.hpp"

namespace spinners {

struct KernelKind {
  enum class Tag { gaussian, angular };
  Tag tag = Tag::gaussian;
  double sigma = 1.0;

  static KernelKind gaussian(double sigma) {
    if (!(sigma > 0.0)) throw DomainError("KernelKind: sigma must be positive");
    return KernelKind{Tag::gaussian, sigma};
  }
  static KernelKind angular() { return KernelKind{Tag::angular, 0.0}; }
};

/// A spinner projector plus a kernel recipe. Embedding dot products
/// approximate the kernel; d' is the projector's row count.
struct FeatureMap {
  StackedSpinner projector;
  KernelKind kind;
};

/// Gaussian: the 2d'-vector (1/sqrt(d')) (cos(z) || sin(z)) with
/// z = projector(x)/sigma. Angular: the d'-vector of signs of projector(x),
/// sign(0) := +1.
Vec64 embed(const FeatureMap& fm, const Vec64& x);

Eigen::MatrixXd gram_exact(const std::vector<Vec64>& points, const KernelKind& kind);
Eigen::MatrixXd gram_approx(const FeatureMap& fm, const std::vector<Vec64>& points);

/// ||K - K_approx||_F / ||K||_F.
double gram_error(const Eigen::MatrixXd& exact, const Eigen::MatrixXd& approx);

}  // namespace spinners
