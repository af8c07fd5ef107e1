#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spinners/common.hpp"
#include "spinners/spinner.hpp"

namespace spinners {

/// Unconstrained logistic regression data: rows a_i of A, labels y_i in {-1,+1}.
struct LogisticProblem {
  Eigen::MatrixXd features;  // n x d
  Eigen::VectorXd labels;    // length n, entries +-1

  void validate() const;
  std::size_t observations() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
};

struct SketchConfig {
  // nullopt means the exact (sketch-free) Newton step.
  std::optional<SpinnerVariant> sketch_variant;
  std::size_t sketch_rows = 0;  // m >= d when sketching
  std::size_t max_iters = 50;
  double gap_tolerance = 1e-10;
  bool line_search = true;  // backtracking Armijo (alpha = 0.1, beta = 0.5)
  std::uint64_t seed = 0;

  void validate(const LogisticProblem& p) const;
};

struct NewtonTrace {
  std::vector<Eigen::VectorXd> iterates;
  std::vector<double> losses;
  std::vector<double> gaps;      // f(x_t) - f_star
  std::vector<double> seconds;   // wall-clock per iteration
  double f_star = 0.0;
  bool converged = false;
};

double loss(const LogisticProblem& p, const Eigen::VectorXd& x);
Eigen::VectorXd gradient(const LogisticProblem& p, const Eigen::VectorXd& x);

/// diag(sqrt(sigma_i (1 - sigma_i))) * A with sigma_i = 1/(1+exp(-a_i^T x));
/// satisfies B^T B = Hessian of the loss.
Eigen::MatrixXd hessian_sqrt(const LogisticProblem& p, const Eigen::VectorXd& x);

/// Isotropic sketch operator on n-vectors: either the identity (exact) or a
/// stacked spinner over the next power of two, normalized by 1/sqrt(m) so
/// E[S^T S] is approximately the identity.
class SketchOperator {
 public:
  /// Exact (identity) sketch.
  SketchOperator() = default;
  SketchOperator(SpinnerVariant variant, std::size_t input_dim, std::size_t rows,
                 std::uint64_t seed);

  bool is_exact() const { return !projector_.has_value(); }
  std::size_t rows(std::size_t input_dim) const;

  /// Apply to each column of an n x d matrix, yielding m x d.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& columns) const;

 private:
  std::optional<StackedSpinner> projector_;
  std::size_t input_dim_ = 0;
  std::size_t padded_dim_ = 0;
  double norm_ = 1.0;
};

/// Solve ((S B)^T (S B)) delta = -gradient with B the Hessian square root.
/// A ridge of 1e-10 * trace rescues marginal systems; anything worse raises
/// SingularSystemError (the sketch dimension is too small).
Eigen::VectorXd sketched_step(const LogisticProblem& p, const Eigen::VectorXd& x,
                              const SketchOperator& sketch);

NewtonTrace solve(const LogisticProblem& p, const SketchConfig& cfg);

/// Rows drawn from N(0, Sigma) with Sigma_{ij} = 0.99^{|i-j|} (AR(1)
/// covariance, generated through its Cholesky recursion); labels i.i.d.
/// uniform +-1.
LogisticProblem generate_ar1_problem(std::size_t n, std::size_t d, std::uint64_t seed);

}  // namespace spinners
