#include "spinners/newton_sketch.hpp"

#include <chrono>
#include <cmath>

namespace spinners {

namespace {

double log1p_exp(double t) {
  // log(1 + e^t), stable across the whole range.
  if (t > 35.0) return t;
  if (t < -35.0) return std::exp(t);
  return std::log1p(std::exp(t));
}

double sigmoid(double t) {
  if (t >= 0.0) {
    const double e = std::exp(-t);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(t);
  return e / (1.0 + e);
}

}  // namespace

void LogisticProblem::validate() const {
  if (features.rows() < 1 || features.cols() < 1)
    throw DimensionError("LogisticProblem: empty data");
  if (labels.size() != features.rows())
    throw DimensionError("LogisticProblem: label count mismatch");
  if (!features.allFinite()) throw DomainError("LogisticProblem: non-finite features");
  for (Eigen::Index i = 0; i < labels.size(); ++i)
    if (labels(i) != 1.0 && labels(i) != -1.0)
      throw DomainError("LogisticProblem: labels must be +-1");
}

void SketchConfig::validate(const LogisticProblem& p) const {
  if (sketch_variant.has_value() && sketch_rows < p.dim())
    throw DimensionError("SketchConfig: sketch_rows must be >= d");
  if (max_iters < 1) throw DimensionError("SketchConfig: max_iters must be >= 1");
}

double loss(const LogisticProblem& p, const Eigen::VectorXd& x) {
  if (x.size() != p.features.cols()) throw DimensionError("loss: dimension mismatch");
  Eigen::VectorXd margins = p.features * x;
  double total = 0.0;
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    total += log1p_exp(-p.labels(i) * margins(i));
  return total;
}

Eigen::VectorXd gradient(const LogisticProblem& p, const Eigen::VectorXd& x) {
  if (x.size() != p.features.cols()) throw DimensionError("gradient: dimension mismatch");
  Eigen::VectorXd margins = p.features * x;
  Eigen::VectorXd weights(margins.size());
  for (Eigen::Index i = 0; i < margins.size(); ++i)
    weights(i) = (sigmoid(p.labels(i) * margins(i)) - 1.0) * p.labels(i);
  return p.features.transpose() * weights;
}

Eigen::MatrixXd hessian_sqrt(const LogisticProblem& p, const Eigen::VectorXd& x) {
  if (x.size() != p.features.cols()) throw DimensionError("hessian_sqrt: dimension mismatch");
  Eigen::VectorXd margins = p.features * x;
  Eigen::MatrixXd out = p.features;
  for (Eigen::Index i = 0; i < margins.size(); ++i) {
    const double s = sigmoid(margins(i));
    out.row(i) *= std::sqrt(s * (1.0 - s));
  }
  return out;
}

SketchOperator::SketchOperator(SpinnerVariant variant, std::size_t input_dim, std::size_t rows,
                               std::uint64_t seed)
    : input_dim_(input_dim) {
  padded_dim_ = has_hadamard(variant) ? next_power_of_two(input_dim) : input_dim;
  const std::size_t block = std::min(rows, padded_dim_);
  projector_.emplace(variant, padded_dim_, block, rows, seed);
  norm_ = 1.0 / std::sqrt(static_cast<double>(rows));
}

std::size_t SketchOperator::rows(std::size_t input_dim) const {
  return is_exact() ? input_dim : projector_->rows();
}

Eigen::MatrixXd SketchOperator::apply(const Eigen::MatrixXd& columns) const {
  if (is_exact()) return columns;
  if (static_cast<std::size_t>(columns.rows()) != input_dim_)
    throw DimensionError("SketchOperator::apply: row count mismatch");
  const std::size_t m = projector_->rows();
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m), columns.cols());
  Vec64 padded(padded_dim_, 0.0);
  for (Eigen::Index c = 0; c < columns.cols(); ++c) {
    for (std::size_t i = 0; i < input_dim_; ++i) padded[i] = columns(static_cast<Eigen::Index>(i), c);
    std::fill(padded.begin() + static_cast<std::ptrdiff_t>(input_dim_), padded.end(), 0.0);
    Vec64 y = projector_->apply(padded);
    for (std::size_t i = 0; i < m; ++i) out(static_cast<Eigen::Index>(i), c) = norm_ * y[i];
  }
  return out;
}

Eigen::VectorXd sketched_step(const LogisticProblem& p, const Eigen::VectorXd& x,
                              const SketchOperator& sketch) {
  Eigen::MatrixXd sqrt_h = hessian_sqrt(p, x);
  Eigen::MatrixXd sketched = sketch.apply(sqrt_h);
  if (static_cast<std::size_t>(sketched.rows()) < p.dim())
    throw DimensionError("sketched_step: sketch dimension below d");
  Eigen::MatrixXd normal = sketched.transpose() * sketched;
  Eigen::VectorXd rhs = -gradient(p, x);

  Eigen::LLT<Eigen::MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) {
    const double ridge = 1e-10 * normal.trace();
    normal.diagonal().array() += ridge;
    llt.compute(normal);
    if (llt.info() != Eigen::Success)
      throw SingularSystemError(
          "sketched_step: sketched Hessian is indefinite; sketch dimension too small");
  }
  return llt.solve(rhs);
}

NewtonTrace solve(const LogisticProblem& p, const SketchConfig& cfg) {
  p.validate();
  cfg.validate(p);
  const std::size_t d = p.dim();
  const std::size_t n = p.observations();

  // Reference optimum for the optimality gap: exact Newton run to a Newton
  // decrement below round-off level.
  double f_star;
  {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));
    SketchOperator exact;
    for (int it = 0; it < 200; ++it) {
      Eigen::VectorXd step = sketched_step(p, x, exact);
      Eigen::VectorXd grad = gradient(p, x);
      const double decrement = -grad.dot(step);
      double s = 1.0;
      const double f0 = loss(p, x);
      while (s > 1e-12 && loss(p, x + s * step) > f0 - 0.1 * s * decrement) s *= 0.5;
      x += s * step;
      if (decrement / 2.0 < 1e-13) break;
    }
    f_star = loss(p, x);
  }

  NewtonTrace trace;
  trace.f_star = f_star;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d));

  for (std::size_t t = 0; t < cfg.max_iters; ++t) {
    const auto tic = std::chrono::steady_clock::now();
    SketchOperator sketch;  // fresh sketch every iteration
    if (cfg.sketch_variant.has_value())
      sketch = SketchOperator(*cfg.sketch_variant, n, cfg.sketch_rows, mix_seed(cfg.seed, t));

    Eigen::VectorXd step = sketched_step(p, x, sketch);
    const double f0 = loss(p, x);
    double s = 1.0;
    if (cfg.line_search) {
      const double slope = gradient(p, x).dot(step);
      while (s > 1e-12 && loss(p, x + s * step) > f0 + 0.1 * s * slope) s *= 0.5;
    }
    Eigen::VectorXd x_next = x + s * step;
    const double f_next = loss(p, x_next);
    if (!cfg.line_search && f_next > f0)
      throw SingularSystemError("solve: loss increased under a full step (divergence)");
    x = x_next;
    const auto toc = std::chrono::steady_clock::now();

    trace.iterates.push_back(x);
    trace.losses.push_back(f_next);
    trace.gaps.push_back(f_next - f_star);
    trace.seconds.push_back(std::chrono::duration<double>(toc - tic).count());
    if (f_next - f_star <= cfg.gap_tolerance) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

LogisticProblem generate_ar1_problem(std::size_t n, std::size_t d, std::uint64_t seed) {
  if (n < 1 || d < 1) throw DimensionError("generate_ar1_problem: n, d must be >= 1");
  const double rho = 0.99;
  const double noise = std::sqrt(1.0 - rho * rho);
  Rng rng(mix_seed(seed, 7));
  LogisticProblem p;
  p.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
  for (std::size_t i = 0; i < n; ++i) {
    double prev = rng.gaussian();
    p.features(static_cast<Eigen::Index>(i), 0) = prev;
    for (std::size_t j = 1; j < d; ++j) {
      prev = rho * prev + noise * rng.gaussian();
      p.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = prev;
    }
  }
  p.labels.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i)
    p.labels(static_cast<Eigen::Index>(i)) = rng.rademacher();
  return p;
}

}  // namespace spinners
