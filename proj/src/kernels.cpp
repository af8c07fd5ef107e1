#include "spinners/kernels.hpp"

#include <cmath>

namespace spinners {

namespace {

bool is_zero(const Vec64& x) {
  for (double v : x)
    if (v != 0.0) return false;
  return true;
}

}  // namespace

Vec64 embed(const FeatureMap& fm, const Vec64& x) {
  check_finite(x, "embed");
  const std::size_t dprime = fm.projector.rows();
  if (fm.kind.tag == KernelKind::Tag::angular && is_zero(x))
    throw DomainError("embed: angular kernel undefined at the zero vector");
  Vec64 z = fm.projector.apply(x);
  if (fm.kind.tag == KernelKind::Tag::angular) {
    for (double& v : z) v = (v < 0.0) ? -1.0 : 1.0;
    return z;
  }
  const double inv_sigma = 1.0 / fm.kind.sigma;
  const double norm = 1.0 / std::sqrt(static_cast<double>(dprime));
  Vec64 out(2 * dprime);
  for (std::size_t i = 0; i < dprime; ++i) {
    const double t = z[i] * inv_sigma;
    out[i] = norm * std::cos(t);
    out[dprime + i] = norm * std::sin(t);
  }
  return out;
}

Eigen::MatrixXd gram_exact(const std::vector<Vec64>& points, const KernelKind& kind) {
  if (points.empty()) throw DimensionError("gram_exact: empty dataset");
  const std::size_t count = points.size();
  const std::size_t dim = points.front().size();
  for (const auto& p : points) {
    if (p.size() != dim) throw DimensionError("gram_exact: ragged dataset");
    check_finite(p, "gram_exact");
    if (kind.tag == KernelKind::Tag::angular && is_zero(p))
      throw DomainError("gram_exact: angular kernel undefined at the zero vector");
  }
  Eigen::MatrixXd gram(count, count);
  std::vector<double> norms(count);
  for (std::size_t i = 0; i < count; ++i) {
    double s = 0.0;
    for (double v : points[i]) s += v * v;
    norms[i] = std::sqrt(s);
  }
  for (std::size_t i = 0; i < count; ++i) {
    gram(i, i) = 1.0;
    for (std::size_t j = i + 1; j < count; ++j) {
      double value;
      if (kind.tag == KernelKind::Tag::gaussian) {
        double dist2 = 0.0;
        for (std::size_t t = 0; t < dim; ++t) {
          const double diff = points[i][t] - points[j][t];
          dist2 += diff * diff;
        }
        value = std::exp(-dist2 / (2.0 * kind.sigma * kind.sigma));
      } else {
        double dot = 0.0;
        for (std::size_t t = 0; t < dim; ++t) dot += points[i][t] * points[j][t];
        double c = dot / (norms[i] * norms[j]);
        c = std::clamp(c, -1.0, 1.0);
        value = 1.0 - std::acos(c) / M_PI;
      }
      gram(i, j) = value;
      gram(j, i) = value;
    }
  }
  return gram;
}

Eigen::MatrixXd gram_approx(const FeatureMap& fm, const std::vector<Vec64>& points) {
  if (points.empty()) throw DimensionError("gram_approx: empty dataset");
  const std::size_t count = points.size();
  const std::size_t dprime = fm.projector.rows();

  Eigen::MatrixXd features(count, 0);
  for (std::size_t i = 0; i < count; ++i) {
    Vec64 e = embed(fm, points[i]);
    if (features.cols() == 0) features.resize(count, static_cast<Eigen::Index>(e.size()));
    for (std::size_t j = 0; j < e.size(); ++j)
      features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = e[j];
  }

  if (fm.kind.tag == KernelKind::Tag::gaussian) {
    Eigen::MatrixXd gram = features * features.transpose();
    // Exact 1 on the diagonal (cos^2 + sin^2 summed and normalized).
    for (Eigen::Index i = 0; i < gram.rows(); ++i) gram(i, i) = 1.0;
    return gram;
  }
  // Angular: 1 - hamming/d' over sign vectors; with s in {-1,+1}^d' this is
  // 1/2 + <s_i, s_j> / (2 d').
  Eigen::MatrixXd dots = features * features.transpose();
  const double inv = 1.0 / (2.0 * static_cast<double>(dprime));
  Eigen::MatrixXd gram = Eigen::MatrixXd::Constant(count, count, 0.5) + inv * dots;
  for (Eigen::Index i = 0; i < gram.rows(); ++i) gram(i, i) = 1.0;
  return gram;
}

double gram_error(const Eigen::MatrixXd& exact, const Eigen::MatrixXd& approx) {
  if (exact.rows() != approx.rows() || exact.cols() != approx.cols())
    throw DimensionError("gram_error: shape mismatch");
  const double denom = exact.norm();
  if (denom == 0.0) throw DomainError("gram_error: exact Gram matrix is zero");
  return (exact - approx).norm() / denom;
}

}  // namespace spinners
