#include "spinners/spinner.hpp"

#include <bit>
#include <cmath>
#include <utility>

namespace spinners {

std::string to_string(SpinnerVariant v) {
  switch (v) {
    case SpinnerVariant::hd3_hd2_hd1: return "HD3HD2HD1";
    case SpinnerVariant::hdg_hd2_hd1: return "HDgHD2HD1";
    case SpinnerVariant::gcirc_d2_hd1: return "GcircD2HD1";
    case SpinnerVariant::gtoeplitz_d2_hd1: return "GToeplitzD2HD1";
    case SpinnerVariant::gskew_circ_d2_hd1: return "GSkewCircD2HD1";
    case SpinnerVariant::gaussian_dense: return "GaussianDense";
  }
  throw DomainError("to_string: unknown variant");
}

SpinnerVariant variant_from_string(const std::string& s) {
  for (SpinnerVariant v : all_variants())
    if (to_string(v) == s) return v;
  throw DomainError("unknown spinner variant: " + s);
}

std::vector<SpinnerVariant> all_variants() {
  return {SpinnerVariant::hd3_hd2_hd1,      SpinnerVariant::hdg_hd2_hd1,
          SpinnerVariant::gcirc_d2_hd1,     SpinnerVariant::gtoeplitz_d2_hd1,
          SpinnerVariant::gskew_circ_d2_hd1, SpinnerVariant::gaussian_dense};
}

std::vector<SpinnerVariant> structured_variants() {
  return {SpinnerVariant::hd3_hd2_hd1, SpinnerVariant::hdg_hd2_hd1,
          SpinnerVariant::gcirc_d2_hd1, SpinnerVariant::gtoeplitz_d2_hd1,
          SpinnerVariant::gskew_circ_d2_hd1};
}

bool has_hadamard(SpinnerVariant v) { return v != SpinnerVariant::gaussian_dense; }

double default_scale(SpinnerVariant v, std::size_t n) {
  if (v == SpinnerVariant::hd3_hd2_hd1 || v == SpinnerVariant::hdg_hd2_hd1)
    return std::sqrt(static_cast<double>(n));
  return 1.0;
}

SpinnerSpec SpinnerSpec::make(SpinnerVariant v, std::size_t n, std::size_t m,
                              std::uint64_t seed) {
  SpinnerSpec s;
  s.variant = v;
  s.n = n;
  s.m = m;
  s.seed = seed;
  s.scale = 0.0;
  s.validate();
  return s;
}

void SpinnerSpec::validate() const {
  if (n < 1) throw DimensionError("SpinnerSpec: n must be >= 1");
  if (m < 1 || m > n) throw DimensionError("SpinnerSpec: need 1 <= m <= n");
  if (has_hadamard(variant) && !is_power_of_two(n))
    throw DimensionError("SpinnerSpec: Hadamard-bearing variant requires power-of-two n, got " +
                         std::to_string(n));
  if (scale != 0.0 && !std::isfinite(scale))
    throw DomainError("SpinnerSpec: non-finite scale");
}

double SpinnerSpec::effective_scale() const {
  return scale == 0.0 ? default_scale(variant, n) : scale;
}

nlohmann::json SpinnerSpec::to_json() const {
  return {{"variant", spinners::to_string(variant)},
          {"n", n},
          {"m", m},
          {"seed", seed},
          {"scale", effective_scale()}};
}

SpinnerSpec SpinnerSpec::from_json(const nlohmann::json& j) {
  SpinnerSpec s;
  s.variant = variant_from_string(j.at("variant").get<std::string>());
  s.n = j.at("n").get<std::size_t>();
  s.m = j.at("m").get<std::size_t>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.scale = j.value("scale", 0.0);
  s.validate();
  return s;
}

void StructuredSpinner::draw_tail(Rng& rng) {
  const std::size_t n = spec_.n;
  d3_.clear();
  g_diag_.clear();
  generator_.reset();
  switch (spec_.variant) {
    case SpinnerVariant::hd3_hd2_hd1: {
      d3_.resize(n);
      for (double& v : d3_) v = rng.rademacher();
      break;
    }
    case SpinnerVariant::hdg_hd2_hd1: {
      g_diag_.resize(n);
      for (double& v : g_diag_) v = rng.gaussian();
      break;
    }
    case SpinnerVariant::gcirc_d2_hd1: {
      Vec64 r(n);
      for (double& v : r) v = rng.gaussian();
      generator_.emplace(CirculantSpec::circulant(std::move(r)));
      break;
    }
    case SpinnerVariant::gtoeplitz_d2_hd1: {
      Vec64 col(n), row(n);
      for (double& v : col) v = rng.gaussian();
      row[0] = col[0];
      for (std::size_t i = 1; i < n; ++i) row[i] = rng.gaussian();
      generator_.emplace(CirculantSpec::toeplitz(std::move(col), std::move(row)));
      break;
    }
    case SpinnerVariant::gskew_circ_d2_hd1: {
      Vec64 r(n);
      for (double& v : r) v = rng.gaussian();
      generator_.emplace(CirculantSpec::skew_circulant(std::move(r)));
      break;
    }
    case SpinnerVariant::gaussian_dense: {
      dense_.resize(static_cast<Eigen::Index>(spec_.m), static_cast<Eigen::Index>(n));
      for (Eigen::Index i = 0; i < dense_.rows(); ++i)
        for (Eigen::Index j = 0; j < dense_.cols(); ++j) dense_(i, j) = rng.gaussian();
      break;
    }
  }
}

StructuredSpinner StructuredSpinner::build(const SpinnerSpec& spec) {
  spec.validate();
  StructuredSpinner sp;
  sp.spec_ = spec;
  if (has_hadamard(spec.variant)) {
    Rng front(mix_seed(spec.seed, 1));
    sp.d1_.resize(spec.n);
    sp.d2_.resize(spec.n);
    for (double& v : sp.d1_) v = front.rademacher();
    for (double& v : sp.d2_) v = front.rademacher();
  }
  Rng tail(mix_seed(spec.seed, 2));
  sp.draw_tail(tail);
  return sp;
}

StructuredSpinner StructuredSpinner::resample_last_block(std::uint64_t tail_seed) const {
  StructuredSpinner sp = *this;
  Rng tail(mix_seed(tail_seed, 2));
  sp.draw_tail(tail);
  return sp;
}

StructuredSpinner StructuredSpinner::resample_tail(std::uint64_t tail_seed) const {
  StructuredSpinner sp = *this;
  Rng rng(mix_seed(tail_seed, 3));
  if (has_hadamard(spec_.variant))
    for (double& v : sp.d2_) v = rng.rademacher();
  sp.draw_tail(rng);
  return sp;
}

StructuredSpinner StructuredSpinner::with_tail_vector(Vec64 r) const {
  if (r.size() != spec_.n) throw DimensionError("with_tail_vector: length mismatch");
  check_finite(r, "with_tail_vector");
  StructuredSpinner sp = *this;
  switch (spec_.variant) {
    case SpinnerVariant::hd3_hd2_hd1:
      sp.d3_ = std::move(r);
      break;
    case SpinnerVariant::hdg_hd2_hd1:
      sp.g_diag_ = std::move(r);
      break;
    default:
      throw DomainError("with_tail_vector: only valid for Hadamard-only variants");
  }
  return sp;
}

Vec64 StructuredSpinner::apply_front_blocks(const Vec64& x) const {
  if (!has_hadamard(spec_.variant))
    throw DomainError("apply_front_blocks: dense baseline has no block structure");
  if (x.size() != spec_.n) throw DimensionError("apply_front_blocks: length mismatch");
  Vec64 v = fwht_normalized(diag_matvec(d1_, x));
  switch (spec_.variant) {
    case SpinnerVariant::hd3_hd2_hd1:
    case SpinnerVariant::hdg_hd2_hd1:
      return fwht_normalized(diag_matvec(d2_, v));
    default:
      return diag_matvec(d2_, v);  // M2 = D2 for the circulant family
  }
}

Vec64 StructuredSpinner::apply(const Vec64& x) const {
  const std::size_t n = spec_.n;
  if (x.size() != n)
    throw DimensionError("StructuredSpinner::apply: expected length " + std::to_string(n) +
                         ", got " + std::to_string(x.size()));
  check_finite(x, "StructuredSpinner::apply");
  const double scale = spec_.effective_scale();

  if (spec_.variant == SpinnerVariant::gaussian_dense) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd yv = dense_ * xv;
    Vec64 y(spec_.m);
    for (std::size_t i = 0; i < spec_.m; ++i) y[i] = scale * yv(static_cast<Eigen::Index>(i));
    return y;
  }

  Vec64 v = apply_front_blocks(x);
  switch (spec_.variant) {
    case SpinnerVariant::hd3_hd2_hd1:
      v = fwht_normalized(diag_matvec(d3_, v));
      break;
    case SpinnerVariant::hdg_hd2_hd1:
      v = fwht_normalized(diag_matvec(g_diag_, v));
      break;
    default:
      v = generator_->apply(v);
      break;
  }
  v.resize(spec_.m);
  for (double& e : v) e *= scale;
  return v;
}

Eigen::MatrixXd StructuredSpinner::to_dense() const {
  if (spec_.variant == SpinnerVariant::gaussian_dense)
    return spec_.effective_scale() * dense_;
  Eigen::MatrixXd out(static_cast<Eigen::Index>(spec_.m), static_cast<Eigen::Index>(spec_.n));
  Vec64 e(spec_.n, 0.0);
  for (std::size_t j = 0; j < spec_.n; ++j) {
    e[j] = 1.0;
    Vec64 col = apply(e);
    e[j] = 0.0;
    for (std::size_t i = 0; i < spec_.m; ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
  }
  return out;
}

StackedSpinner::StackedSpinner(SpinnerVariant variant, std::size_t n, std::size_t m,
                               std::size_t k, std::uint64_t seed)
    : k_(k) {
  if (k < 1) throw DimensionError("StackedSpinner: k must be >= 1");
  const std::size_t n_blocks = (k + m - 1) / m;
  blocks_.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b)
    blocks_.push_back(StructuredSpinner::build(SpinnerSpec::make(variant, n, m, mix_seed(seed, b))));
}

StackedSpinner::StackedSpinner(std::vector<StructuredSpinner> blocks, std::size_t k)
    : blocks_(std::move(blocks)), k_(k) {
  if (blocks_.empty()) throw DimensionError("StackedSpinner: need at least one block");
  const std::size_t m = blocks_.front().rows();
  const std::size_t n = blocks_.front().input_dim();
  for (const auto& b : blocks_)
    if (b.rows() != m || b.input_dim() != n)
      throw DimensionError("StackedSpinner: blocks must share (n, m)");
  if (k_ < 1 || k_ > blocks_.size() * m)
    throw DimensionError("StackedSpinner: k out of range for given blocks");
}

std::size_t StackedSpinner::input_dim() const { return blocks_.front().input_dim(); }

Vec64 StackedSpinner::apply(const Vec64& x) const {
  Vec64 out;
  out.reserve(k_);
  for (const auto& block : blocks_) {
    Vec64 y = block.apply(x);
    for (double v : y) {
      out.push_back(v);
      if (out.size() == k_) return out;
    }
  }
  return out;
}

FitResult fit_to_target(const StructuredSpinner& prototype, const Eigen::MatrixXd& target,
                        const std::vector<Vec64>& basis) {
  const SpinnerSpec& spec = prototype.spec();
  const std::size_t n = spec.n;
  const std::size_t m = spec.m;
  const std::size_t d = basis.size();
  if (spec.variant != SpinnerVariant::hd3_hd2_hd1 && spec.variant != SpinnerVariant::hdg_hd2_hd1)
    throw DomainError("fit_to_target: last block must be of the H*diag(r) form");
  if (d == 0) throw DimensionError("fit_to_target: empty basis");
  if (target.rows() != static_cast<Eigen::Index>(m) ||
      target.cols() != static_cast<Eigen::Index>(n))
    throw DimensionError("fit_to_target: target must be m x n");
  if (!target.allFinite()) throw DomainError("fit_to_target: non-finite target");
  if (m * d > n)
    throw SingularSystemError("fit_to_target: m*d = " + std::to_string(m * d) + " > n = " +
                              std::to_string(n) + "; the interpolation system is rank-deficient");
  for (const auto& x : basis) {
    if (x.size() != n) throw DimensionError("fit_to_target: basis vector length mismatch");
    check_finite(x, "fit_to_target.basis");
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double dot = 0.0;
      for (std::size_t t = 0; t < n; ++t) dot += basis[i][t] * basis[j][t];
      const double want = (i == j) ? 1.0 : 0.0;
      if (std::abs(dot - want) > 1e-8)
        throw DomainError("fit_to_target: basis is not orthonormal");
    }
  }

  const double scale = spec.effective_scale();
  const double hnorm = 1.0 / std::sqrt(static_cast<double>(n));
  const std::size_t rows = m * d;

  // Row (i, p): scale * sum_j H[p][j] * w_i[j] * r[j] = (target x_i)[p],
  // with w_i = M2 M1 x_i. Linear in r because the last block is H diag(r).
  Eigen::MatrixXd sys(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(n));
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(rows));
  for (std::size_t i = 0; i < d; ++i) {
    Vec64 w = prototype.apply_front_blocks(basis[i]);
    Eigen::Map<const Eigen::VectorXd> xi(basis[i].data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd ti = target * xi;
    for (std::size_t p = 0; p < m; ++p) {
      const Eigen::Index row = static_cast<Eigen::Index>(i * m + p);
      for (std::size_t j = 0; j < n; ++j) {
        const double hpj = (std::popcount(p & j) & 1) ? -hnorm : hnorm;
        sys(row, static_cast<Eigen::Index>(j)) = scale * hpj * w[j];
      }
      rhs(row) = ti(static_cast<Eigen::Index>(p));
    }
  }

  // Rank-revealing minimum-norm least squares; the bad event of the adaptive
  // construction surfaces as rank deficiency rather than amplified error.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys);
  if (cod.rank() < static_cast<Eigen::Index>(rows))
    throw SingularSystemError("fit_to_target: interpolation system is rank-deficient (rank " +
                              std::to_string(cod.rank()) + " of " + std::to_string(rows) + ")");
  Eigen::VectorXd r = cod.solve(rhs);

  Vec64 rvec(n);
  for (std::size_t j = 0; j < n; ++j) rvec[j] = r(static_cast<Eigen::Index>(j));
  StructuredSpinner fitted = prototype.with_tail_vector(rvec);

  double residual = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    Vec64 got = fitted.apply(basis[i]);
    Eigen::Map<const Eigen::VectorXd> xi(basis[i].data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd want = target * xi;
    double err2 = 0.0;
    for (std::size_t p = 0; p < m; ++p) {
      const double diff = got[p] - want(static_cast<Eigen::Index>(p));
      err2 += diff * diff;
    }
    residual = std::max(residual, std::sqrt(err2));
  }
  return FitResult{std::move(rvec), residual, std::move(fitted)};
}

}  // namespace spinners
