#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "spinners/dataset.hpp"
#include "spinners/diagnostics.hpp"
#include "spinners/kernels.hpp"
#include "spinners/lsh.hpp"
#include "spinners/newton_sketch.hpp"
#include "spinners/spinner.hpp"

namespace {

using nlohmann::json;
using namespace spinners;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Sink for result tables: a file when --out is given, stdout otherwise.
/// All diagnostics go to stderr so data stays pipeable.
struct Output {
  std::ofstream file;
  std::ostream* stream = &std::cout;

  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file.open(path);
      if (!file) throw ParseError("cannot write '" + path + "'");
      stream = &file;
    }
  }
  std::ostream& out() { return *stream; }
};

void emit_config(std::ostream& out, const std::string& command, const json& config) {
  json echo = {{"command", command}, {"config", config}, {"library", "spinners 1.0"}};
  out << "# " << echo.dump() << "\n";
}

std::vector<Vec64> random_orthonormal_basis(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec64> basis;
  while (basis.size() < d) {
    Vec64 v(n);
    for (double& e : v) e = rng.gaussian();
    for (const auto& b : basis) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += v[i] * b[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
    }
    double norm = 0.0;
    for (double e : v) norm += e * e;
    norm = std::sqrt(norm);
    if (norm < 1e-8) continue;  // degenerate draw, retry
    for (double& e : v) e /= norm;
    basis.push_back(std::move(v));
  }
  return basis;
}

struct DataOptions {
  std::string path;
  bool label_column = false;
  bool pad = false;
  std::size_t synth_dim = 0;
  std::size_t synth_count = 0;

  void attach(CLI::App* cmd) {
    cmd->add_option("--data", path, "CSV dataset, one sample per line");
    cmd->add_flag("--label-column", label_column, "last CSV column is a +-1 label");
    cmd->add_flag("--pad", pad, "zero-pad rows to the next power of two");
    cmd->add_option("--synth-dim", synth_dim, "synthetic Gaussian blob dimension");
    cmd->add_option("--synth-count", synth_count, "synthetic Gaussian blob sample count");
  }

  Dataset load(std::uint64_t seed, SpinnerVariant variant) const {
    Dataset data;
    if (!path.empty()) {
      data = load_csv(path, label_column);
    } else if (synth_dim > 0 && synth_count > 0) {
      data = synth_gaussian_blob(synth_dim, synth_count, mix_seed(seed, 0xda7a));
    } else {
      throw CLI::ValidationError("--data or --synth-dim/--synth-count required");
    }
    if (has_hadamard(variant) && !is_power_of_two(data.dim())) {
      if (!pad)
        throw CLI::ValidationError("dimension " + std::to_string(data.dim()) +
                                   " is not a power of two; pass --pad to zero-pad");
      data = pad_to_power_of_two(std::move(data));
    }
    return data;
  }

  json to_json() const {
    return {{"data", path},         {"label_column", label_column}, {"pad", pad},
            {"synth_dim", synth_dim}, {"synth_count", synth_count}};
  }
};

int run_kernel_approx(SpinnerVariant variant, const std::string& kernel, double sigma,
                      std::vector<std::size_t> features, std::size_t seeds, std::uint64_t seed,
                      const DataOptions& data_opts, const std::string& out_path) {
  Dataset data = data_opts.load(seed, variant);
  KernelKind kind = (kernel == "angular") ? KernelKind::angular() : KernelKind::gaussian(sigma);
  Eigen::MatrixXd exact = gram_exact(data.rows, kind);

  Output output(out_path);
  json config = {{"variant", to_string(variant)}, {"kernel", kernel},   {"sigma", sigma},
                 {"features", features},          {"seeds", seeds},     {"seed", seed},
                 {"dataset", data_opts.to_json()}};
  emit_config(output.out(), "kernel-approx", config);
  output.out() << "features,mean_error,sd_error\n";

  const std::size_t n = data.dim();
  for (std::size_t dprime : features) {
    std::vector<double> errors;
    errors.reserve(seeds);
    for (std::size_t s = 0; s < seeds; ++s) {
      StackedSpinner projector(variant, n, std::min(n, dprime), dprime,
                               mix_seed(seed, dprime * 1000003 + s));
      FeatureMap fm{std::move(projector), kind};
      errors.push_back(gram_error(exact, gram_approx(fm, data.rows)));
    }
    const double mean = std::accumulate(errors.begin(), errors.end(), 0.0) /
                        static_cast<double>(errors.size());
    double var = 0.0;
    for (double e : errors) var += (e - mean) * (e - mean);
    const double sd = errors.size() > 1 ? std::sqrt(var / static_cast<double>(errors.size() - 1))
                                        : 0.0;
    output.out() << dprime << ',' << fmt17(mean) << ',' << fmt17(sd) << '\n';
    std::cerr << "kernel-approx: d'=" << dprime << " mean_error=" << mean << "\n";
  }
  return 0;
}

std::vector<HashedPair> make_collision_pairs(std::size_t n, std::size_t count,
                                             std::uint64_t seed) {
  // Angles spread uniformly over (0, pi) so Euclidean distances
  // 2 sin(theta/2) cover (0, 2).
  std::vector<double> angles(count);
  for (std::size_t i = 0; i < count; ++i)
    angles[i] = M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(count);
  Dataset data = synth_unit_sphere_pairs(n, angles, 1, mix_seed(seed, 0x9a12));
  std::vector<HashedPair> pairs(count);
  for (std::size_t i = 0; i < count; ++i) {
    pairs[i].x = data.rows[2 * i];
    pairs[i].y = data.rows[2 * i + 1];
    pairs[i].distance = 2.0 * std::sin(angles[i] / 2.0);
  }
  return pairs;
}

void emit_curve(std::ostream& out, const CollisionCurve& curve, const CollisionCurve* second,
                const std::vector<double>* diffs) {
  out << (second ? "bucket_low,bucket_high,count,prob_a,prob_b,abs_diff\n"
                 : "bucket_low,bucket_high,count,probability\n");
  for (std::size_t b = 0; b + 1 < curve.bucket_edges.size(); ++b) {
    out << fmt17(curve.bucket_edges[b]) << ',' << fmt17(curve.bucket_edges[b + 1]) << ','
        << curve.counts[b] << ',' << fmt17(curve.probabilities[b]);
    if (second) out << ',' << fmt17(second->probabilities[b]) << ',' << fmt17((*diffs)[b]);
    out << '\n';
  }
}

int run_lsh_collision(SpinnerVariant variant, std::size_t n, std::size_t rows, std::size_t count,
                      std::size_t trials, std::uint64_t seed, const std::string& out_path) {
  auto pairs = make_collision_pairs(n, count, seed);
  CollisionCurve curve =
      collision_curve(pairs, make_hasher_factory(variant, n, rows), trials, seed);
  Output output(out_path);
  json config = {{"variant", to_string(variant)}, {"n", n},         {"rows", rows},
                 {"pairs", count},                {"trials", trials}, {"seed", seed}};
  emit_config(output.out(), "lsh-collision", config);
  emit_curve(output.out(), curve, nullptr, nullptr);
  return 0;
}

int run_lsh_compare(SpinnerVariant va, SpinnerVariant vb, std::size_t n, std::size_t rows,
                    std::size_t count, std::size_t trials, std::uint64_t seed,
                    const std::string& out_path) {
  auto pairs = make_collision_pairs(n, count, seed);
  FamilyComparison cmp =
      compare_families(pairs, make_hasher_factory(va, n, rows), make_hasher_factory(vb, n, rows),
                       trials, mix_seed(seed, 0xa), mix_seed(seed, 0xb));
  Output output(out_path);
  json config = {{"a", to_string(va)}, {"b", to_string(vb)}, {"n", n},       {"rows", rows},
                 {"pairs", count},     {"trials", trials},   {"seed", seed}};
  emit_config(output.out(), "lsh-compare", config);
  output.out() << "# sup_difference " << fmt17(cmp.sup_difference) << "\n";
  emit_curve(output.out(), cmp.curve_a, &cmp.curve_b, &cmp.bucket_differences);
  std::cerr << "lsh-compare: sup difference " << cmp.sup_difference << "\n";
  return 0;
}

int run_newton_sketch(const std::string& sketch, std::size_t rows, std::size_t n, std::size_t d,
                      std::size_t iters, double gap_tol, bool no_line_search, std::uint64_t seed,
                      const std::string& out_path) {
  LogisticProblem problem = generate_ar1_problem(n, d, mix_seed(seed, 0xa51));
  SketchConfig cfg;
  if (sketch != "Exact") cfg.sketch_variant = variant_from_string(sketch);
  cfg.sketch_rows = rows == 0 ? 4 * d : rows;
  cfg.max_iters = iters;
  cfg.gap_tolerance = gap_tol;
  cfg.line_search = !no_line_search;
  cfg.seed = mix_seed(seed, 0x57e9);
  NewtonTrace trace = solve(problem, cfg);

  Output output(out_path);
  json config = {{"sketch", sketch}, {"rows", cfg.sketch_rows}, {"n", n},
                 {"d", d},           {"iters", iters},          {"gap_tolerance", gap_tol},
                 {"line_search", cfg.line_search},              {"seed", seed}};
  emit_config(output.out(), "newton-sketch", config);
  output.out() << "iter,loss,gap,seconds\n";
  for (std::size_t t = 0; t < trace.losses.size(); ++t)
    output.out() << t << ',' << fmt17(trace.losses[t]) << ',' << fmt17(trace.gaps[t]) << ','
                 << fmt17(trace.seconds[t]) << '\n';
  std::cerr << "newton-sketch: " << trace.losses.size() << " iterations, final gap "
            << trace.gaps.back() << (trace.converged ? " (converged)" : "") << "\n";
  return 0;
}

int run_fit(SpinnerVariant variant, std::size_t n, std::size_t m, std::size_t d,
            std::size_t trials, std::uint64_t seed, const std::string& out_path) {
  Output output(out_path);
  json config = {{"variant", to_string(variant)}, {"n", n},       {"m", m},
                 {"d", d},                        {"trials", trials}, {"seed", seed}};
  emit_config(output.out(), "fit", config);
  output.out() << "trial,residual,status\n";
  for (std::size_t t = 0; t < trials; ++t) {
    const std::uint64_t trial_seed = mix_seed(seed, t);
    StructuredSpinner proto =
        StructuredSpinner::build(SpinnerSpec::make(variant, n, m, trial_seed));
    Rng rng(mix_seed(trial_seed, 0x7a6));
    Eigen::MatrixXd target(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < target.rows(); ++i)
      for (Eigen::Index j = 0; j < target.cols(); ++j) target(i, j) = rng.gaussian();
    auto basis = random_orthonormal_basis(n, d, mix_seed(trial_seed, 0xba5));
    try {
      FitResult fit = fit_to_target(proto, target, basis);
      output.out() << t << ',' << fmt17(fit.residual) << ",ok\n";
    } catch (const SingularSystemError& e) {
      output.out() << t << ",nan,singular\n";
      std::cerr << "fit: trial " << t << ": " << e.what() << "\n";
    }
  }
  return 0;
}

int run_bench(SpinnerVariant variant, std::vector<std::size_t> sizes, std::size_t reps,
              std::uint64_t seed, const std::string& out_path) {
  auto rows = bench_matvec(variant, sizes, reps, seed);
  Output output(out_path);
  json config = {{"variant", to_string(variant)}, {"sizes", sizes}, {"reps", reps}, {"seed", seed}};
  emit_config(output.out(), "bench", config);
  output.out() << "n,structured_ns,dense_ns,speedup\n";
  for (const auto& row : rows)
    output.out() << row.n << ',' << fmt17(row.structured_ns) << ',' << fmt17(row.dense_ns) << ','
                 << fmt17(row.speedup) << '\n';
  return 0;
}

int run_diag_balance(std::size_t n, double delta, std::size_t trials, std::uint64_t seed,
                     const std::string& out_path) {
  BalancednessReport report = balancedness_rate(n, delta, trials, seed);
  Output output(out_path);
  json config = {{"n", n}, {"delta", report.delta}, {"trials", trials}, {"seed", seed}};
  emit_config(output.out(), "diag balance", config);
  output.out() << "n,delta,trials,empirical_rate,theory_bound\n";
  output.out() << report.n << ',' << fmt17(report.delta) << ',' << report.trials << ','
               << fmt17(report.empirical_rate) << ',' << fmt17(report.theory_bound) << '\n';
  return 0;
}

int run_diag_covariance(SpinnerVariant variant, std::size_t n, std::size_t m, std::size_t d,
                        std::size_t resamples, std::uint64_t seed, const std::string& out_path) {
  auto basis = random_orthonormal_basis(n, d, mix_seed(seed, 0xba5e));
  CovarianceReport report = projection_covariance(variant, n, m, basis, resamples, seed);
  Output output(out_path);
  json config = {{"variant", to_string(variant)}, {"n", n},
                 {"m", m},                        {"d", d},
                 {"resamples", resamples},        {"seed", seed}};
  emit_config(output.out(), "diag covariance", config);
  output.out() << "m,d,resamples,max_off_diagonal,max_diag_deviation\n";
  output.out() << report.m << ',' << report.d << ',' << report.resamples << ','
               << fmt17(report.max_off_diagonal) << ',' << fmt17(report.max_diag_deviation)
               << '\n';
  return 0;
}

int run_diag_ks(SpinnerVariant va, SpinnerVariant vb, std::size_t n, std::size_t samples,
                std::uint64_t seed, const std::string& out_path) {
  // Distribution of the first projection coordinate of a fixed unit vector
  // under independently redrawn projectors.
  Rng rng(mix_seed(seed, 0xf1e));
  Vec64 x(n);
  double norm = 0.0;
  for (double& v : x) {
    v = rng.gaussian();
    norm += v * v;
  }
  norm = std::sqrt(norm);
  for (double& v : x) v /= norm;

  auto draw = [&](SpinnerVariant variant, std::uint64_t stream) {
    std::vector<double> out(samples);
    for (std::size_t s = 0; s < samples; ++s) {
      StructuredSpinner sp =
          StructuredSpinner::build(SpinnerSpec::make(variant, n, 1, mix_seed(seed, stream + s)));
      out[s] = sp.apply(x)[0];
    }
    return out;
  };
  const double ks = ks_distance(draw(va, 1u << 20), draw(vb, 1u << 21));

  Output output(out_path);
  json config = {{"a", to_string(va)}, {"b", to_string(vb)}, {"n", n},
                 {"samples", samples}, {"seed", seed}};
  emit_config(output.out(), "diag ks", config);
  output.out() << "samples,ks_distance\n";
  output.out() << samples << ',' << fmt17(ks) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structured spinner experiments: fast structured projections with kernel, "
               "LSH, Newton-sketch, and adaptive-fit applications"};
  app.require_subcommand(1);

  std::string out_path;
  app.add_option("--out", out_path, "output file (default: stdout)")->capture_default_str();

  const auto variant_check = [](const std::string& s) -> std::string {
    try {
      variant_from_string(s);
      return {};
    } catch (const std::exception& e) {
      return e.what();
    }
  };

  // kernel-approx
  std::string ka_variant = "HD3HD2HD1", ka_kernel = "gaussian";
  double ka_sigma = 1.0;
  std::vector<std::size_t> ka_features;
  std::size_t ka_seeds = 10;
  std::uint64_t ka_seed = 1;
  DataOptions ka_data;
  auto* ka = app.add_subcommand("kernel-approx", "Gram reconstruction error vs feature count");
  ka->add_option("--variant", ka_variant)->check(variant_check);
  ka->add_option("--kernel", ka_kernel)->check(CLI::IsMember({"gaussian", "angular"}));
  ka->add_option("--sigma", ka_sigma, "Gaussian kernel bandwidth (G50C profile: 17.4734, "
                                      "USPST profile: 9.4338)");
  ka->add_option("--features", ka_features, "feature counts d' (repeatable)")->required();
  ka->add_option("--seeds", ka_seeds, "independent projector draws per d'");
  ka->add_option("--seed", ka_seed);
  ka_data.attach(ka);

  // lsh-collision
  std::string lc_variant = "HD3HD2HD1";
  std::size_t lc_n = 256, lc_rows = 64, lc_pairs = 20000, lc_trials = 100;
  std::uint64_t lc_seed = 1;
  auto* lc = app.add_subcommand("lsh-collision", "cross-polytope collision probability curve");
  lc->add_option("--variant", lc_variant)->check(variant_check);
  lc->add_option("--n", lc_n);
  lc->add_option("--rows", lc_rows);
  lc->add_option("--pairs", lc_pairs);
  lc->add_option("--trials", lc_trials);
  lc->add_option("--seed", lc_seed);

  // lsh-compare
  std::string lx_a = "GaussianDense", lx_b = "HD3HD2HD1";
  std::size_t lx_n = 256, lx_rows = 64, lx_pairs = 20000, lx_trials = 100;
  std::uint64_t lx_seed = 1;
  auto* lx = app.add_subcommand("lsh-compare", "collision-curve closeness of two families");
  lx->add_option("--a", lx_a)->check(variant_check);
  lx->add_option("--b", lx_b)->check(variant_check);
  lx->add_option("--n", lx_n);
  lx->add_option("--rows", lx_rows);
  lx->add_option("--pairs", lx_pairs);
  lx->add_option("--trials", lx_trials);
  lx->add_option("--seed", lx_seed);

  // newton-sketch
  std::string ns_sketch = "HD3HD2HD1";
  std::size_t ns_rows = 0, ns_n = 1000, ns_d = 50, ns_iters = 50;
  double ns_gap_tol = 1e-10;
  bool ns_no_ls = false;
  std::uint64_t ns_seed = 1;
  auto* ns = app.add_subcommand("newton-sketch", "sketched Newton on AR(1) logistic regression");
  ns->add_option("--sketch", ns_sketch, "spinner variant or 'Exact'")
      ->check([&](const std::string& s) { return s == "Exact" ? std::string{} : variant_check(s); });
  ns->add_option("--rows", ns_rows, "sketch rows m (default 4d)");
  ns->add_option("--n", ns_n);
  ns->add_option("--d", ns_d);
  ns->add_option("--iters", ns_iters);
  ns->add_option("--gap-tol", ns_gap_tol);
  ns->add_flag("--no-line-search", ns_no_ls);
  ns->add_option("--seed", ns_seed);

  // fit
  std::string ft_variant = "HD3HD2HD1";
  std::size_t ft_n = 32, ft_m = 4, ft_d = 4, ft_trials = 20;
  std::uint64_t ft_seed = 1;
  auto* ft = app.add_subcommand("fit", "adaptive last-block fit to a target matrix");
  ft->add_option("--variant", ft_variant)->check(variant_check);
  ft->add_option("--n", ft_n);
  ft->add_option("--m", ft_m);
  ft->add_option("--d", ft_d);
  ft->add_option("--trials", ft_trials);
  ft->add_option("--seed", ft_seed);

  // bench
  std::string bn_variant = "HD3HD2HD1";
  std::vector<std::size_t> bn_sizes;
  std::size_t bn_reps = 25;
  std::uint64_t bn_seed = 1;
  auto* bn = app.add_subcommand("bench", "single-thread matvec timing vs naive dense");
  bn->add_option("--variant", bn_variant)->check(variant_check);
  bn->add_option("--sizes", bn_sizes, "power-of-two sizes (repeatable)")->required();
  bn->add_option("--reps", bn_reps);
  bn->add_option("--seed", bn_seed);

  // diag
  auto* diag = app.add_subcommand("diag", "theory diagnostics");
  diag->require_subcommand(1);
  std::size_t db_n = 4096, db_trials = 10000;
  double db_delta = -1.0;  // negative selects the ln(n) default
  std::uint64_t db_seed = 1;
  auto* db = diag->add_subcommand("balance", "HD1 balancedness exceedance rate");
  db->add_option("--n", db_n);
  db->add_option("--delta", db_delta, "threshold multiplier (default ln n)");
  db->add_option("--trials", db_trials);
  db->add_option("--seed", db_seed);

  std::string dc_variant = "HD3HD2HD1";
  std::size_t dc_n = 256, dc_m = 8, dc_d = 2, dc_resamples = 20000;
  std::uint64_t dc_seed = 1;
  auto* dc = diag->add_subcommand("covariance", "stacked projection covariance vs identity");
  dc->add_option("--variant", dc_variant)->check(variant_check);
  dc->add_option("--n", dc_n);
  dc->add_option("--m", dc_m);
  dc->add_option("--d", dc_d);
  dc->add_option("--resamples", dc_resamples);
  dc->add_option("--seed", dc_seed);

  std::string dk_a = "GaussianDense", dk_b = "HD3HD2HD1";
  std::size_t dk_n = 1024, dk_samples = 5000;
  std::uint64_t dk_seed = 1;
  auto* dk = diag->add_subcommand("ks", "KS distance of projection coordinates");
  dk->add_option("--a", dk_a)->check(variant_check);
  dk->add_option("--b", dk_b)->check(variant_check);
  dk->add_option("--n", dk_n);
  dk->add_option("--samples", dk_samples);
  dk->add_option("--seed", dk_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (ka->parsed())
      return run_kernel_approx(variant_from_string(ka_variant), ka_kernel, ka_sigma, ka_features,
                               ka_seeds, ka_seed, ka_data, out_path);
    if (lc->parsed())
      return run_lsh_collision(variant_from_string(lc_variant), lc_n, lc_rows, lc_pairs,
                               lc_trials, lc_seed, out_path);
    if (lx->parsed())
      return run_lsh_compare(variant_from_string(lx_a), variant_from_string(lx_b), lx_n, lx_rows,
                             lx_pairs, lx_trials, lx_seed, out_path);
    if (ns->parsed())
      return run_newton_sketch(ns_sketch, ns_rows, ns_n, ns_d, ns_iters, ns_gap_tol, ns_no_ls,
                               ns_seed, out_path);
    if (ft->parsed())
      return run_fit(variant_from_string(ft_variant), ft_n, ft_m, ft_d, ft_trials, ft_seed,
                     out_path);
    if (bn->parsed())
      return run_bench(variant_from_string(bn_variant), bn_sizes, bn_reps, bn_seed, out_path);
    if (diag->parsed()) {
      if (db->parsed()) return run_diag_balance(db_n, db_delta, db_trials, db_seed, out_path);
      if (dc->parsed())
        return run_diag_covariance(variant_from_string(dc_variant), dc_n, dc_m, dc_d,
                                   dc_resamples, dc_seed, out_path);
      if (dk->parsed())
        return run_diag_ks(variant_from_string(dk_a), variant_from_string(dk_b), dk_n, dk_samples,
                           dk_seed, out_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand executed\n";
  return 2;
}
