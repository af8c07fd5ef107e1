// End-to-end acceptance checks, one test case per criterion. Each case
// prints a single PASS/FAIL line so the suite doubles as a report.

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spinners/dataset.hpp"
#include "spinners/diagnostics.hpp"
#include "spinners/kernels.hpp"
#include "spinners/lsh.hpp"
#include "spinners/newton_sketch.hpp"
#include "spinners/spinner.hpp"

using namespace spinners;

namespace {

void report(int number, const std::string& name, bool ok) {
  std::cout << "[criterion " << number << "] " << name << ": " << (ok ? "PASS" : "FAIL")
            << std::endl;
  CHECK_MESSAGE(ok, "criterion ", number, " (", name, ")");
}

}  // namespace

TEST_CASE("criterion 1: transform correctness against dense oracles") {
  bool ok = true;
  for (SpinnerVariant v : all_variants()) {
    for (std::size_t n : {4u, 8u, 16u, 32u}) {
      for (std::uint64_t trial = 0; trial < 100; ++trial) {
        auto sp = StructuredSpinner::build(
            SpinnerSpec::make(v, n, n, mix_seed(1000 + static_cast<std::uint64_t>(v), n * 100 + trial)));
        Vec64 x = oracles::random_vec(n, mix_seed(2000, n * 100 + trial));
        Vec64 want = oracles::matvec(oracles::dense_spinner(sp), x);
        if (oracles::max_abs_diff(sp.apply(x), want) > 1e-9) ok = false;
      }
    }
  }
  report(1, "transform correctness", ok);
}

TEST_CASE("criterion 2: isometry and involution") {
  bool ok = true;
  for (std::size_t n : {std::size_t{2}, std::size_t{64}, std::size_t{1} << 10, std::size_t{1} << 14}) {
    Vec64 x = oracles::random_vec(n, 3000 + n);
    double nx = 0.0;
    for (double v : x) nx += v * v;
    Vec64 y = fwht_normalized(x);
    double ny = 0.0;
    for (double v : y) ny += v * v;
    if (std::abs(std::sqrt(ny) - std::sqrt(nx)) > 1e-12 * std::sqrt(nx)) ok = false;
    if (oracles::max_abs_diff(fwht_normalized(y), x) > 1e-12) ok = false;
  }
  for (std::uint64_t s = 0; s < 10; ++s) {
    SpinnerSpec spec = SpinnerSpec::make(SpinnerVariant::hd3_hd2_hd1, 256, 256, 4000 + s);
    spec.scale = 1.0;  // unscaled: a pure rotation
    auto sp = StructuredSpinner::build(spec);
    Vec64 x = oracles::random_vec(256, 5000 + s);
    Vec64 y = sp.apply(x);
    double nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < 256; ++i) {
      nx += x[i] * x[i];
      ny += y[i] * y[i];
    }
    if (std::abs(std::sqrt(ny) - std::sqrt(nx)) > 1e-10) ok = false;
  }
  report(2, "isometry and involution", ok);
}

TEST_CASE("criterion 3: kernel exactness anchors") {
  bool ok = true;
  Vec64 a = {1.0, 0.0, 0.0};
  Vec64 b = {0.0, 1.0, 0.0};
  Eigen::MatrixXd ang = gram_exact({a, b}, KernelKind::angular());
  if (std::abs(ang(0, 0) - 1.0) > 1e-12) ok = false;
  if (std::abs(ang(0, 1) - 0.5) > 1e-12) ok = false;

  const double sigma = 1.3;
  Vec64 c = {sigma * std::sqrt(2.0), 0.0, 0.0};
  Eigen::MatrixXd gau = gram_exact({Vec64{0.0, 0.0, 0.0}, c}, KernelKind::gaussian(sigma));
  if (std::abs(gau(1, 1) - 1.0) > 1e-12) ok = false;
  if (std::abs(gau(0, 1) - std::exp(-1.0)) > 1e-12) ok = false;
  report(3, "kernel exactness anchors", ok);
}

TEST_CASE("criterion 4: kernel approximation parity and decay") {
  const std::size_t n = 64, points = 500, seeds = 10;
  const std::vector<std::size_t> dprimes = {32, 64, 128, 256};
  Dataset data = synth_gaussian_blob(n, points, 77);

  bool ok = true;
  for (const KernelKind& kind : {KernelKind::gaussian(4.0), KernelKind::angular()}) {
    Eigen::MatrixXd exact = gram_exact(data.rows, kind);
    // mean_errors[variant][dprime index]
    std::vector<std::vector<double>> means;
    for (SpinnerVariant v : all_variants()) {
      std::vector<double> per_dp;
      for (std::size_t dp : dprimes) {
        double sum = 0.0;
        for (std::uint64_t s = 0; s < seeds; ++s) {
          StackedSpinner proj(v, n, std::min(n, dp), dp,
                              mix_seed(6000 + static_cast<std::uint64_t>(v), dp * 100 + s));
          FeatureMap fm{std::move(proj), kind};
          sum += gram_error(exact, gram_approx(fm, data.rows));
        }
        per_dp.push_back(sum / seeds);
      }
      means.push_back(per_dp);
    }
    const std::vector<double>& baseline = means.back();  // gaussian_dense is last
    for (std::size_t vi = 0; vi < means.size(); ++vi) {
      for (std::size_t k = 0; k < dprimes.size(); ++k) {
        if (k > 0 && means[vi][k] > 1.10 * means[vi][k - 1]) ok = false;
        if (means[vi][k] > 1.2 * baseline[k]) ok = false;
      }
    }
  }
  report(4, "kernel approximation parity", ok);
}

TEST_CASE("criterion 5: LSH collision-curve closeness") {
  const std::size_t n = 256, m = 64, pair_count = 20000, trials = 100;
  std::vector<double> angles(pair_count);
  for (std::size_t i = 0; i < pair_count; ++i)
    angles[i] = M_PI * (static_cast<double>(i) + 0.5) / static_cast<double>(pair_count);
  Dataset data = synth_unit_sphere_pairs(n, angles, 1, 88);
  std::vector<HashedPair> pairs(pair_count);
  for (std::size_t i = 0; i < pair_count; ++i) {
    pairs[i].x = data.rows[2 * i];
    pairs[i].y = data.rows[2 * i + 1];
    pairs[i].distance = 2.0 * std::sin(angles[i] / 2.0);
  }

  FamilyComparison cmp = compare_families(
      pairs, make_hasher_factory(SpinnerVariant::gaussian_dense, n, m),
      make_hasher_factory(SpinnerVariant::hd3_hd2_hd1, n, m), trials, 90, 91);

  bool ok = cmp.sup_difference <= 0.05;
  for (const CollisionCurve* curve : {&cmp.curve_a, &cmp.curve_b}) {
    double prev = 2.0;
    for (double p : curve->probabilities) {
      if (std::isnan(p)) continue;
      if (p > prev + 0.03) ok = false;
      prev = p;
    }
  }
  std::cerr << "  lsh sup difference: " << cmp.sup_difference << "\n";
  report(5, "LSH curve closeness", ok);
}

TEST_CASE("criterion 6: Newton-sketch convergence") {
  bool ok = true;

  LogisticProblem p = generate_ar1_problem(1000, 50, 92);
  SketchConfig exact;
  exact.sketch_variant = std::nullopt;
  exact.max_iters = 15;
  exact.gap_tolerance = 1e-10;
  NewtonTrace et = solve(p, exact);
  if (!(et.converged && et.gaps.back() <= 1e-10 && et.iterates.size() <= 15)) ok = false;

  std::size_t converged = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    LogisticProblem q = generate_ar1_problem(1000, 50, mix_seed(93, s));
    SketchConfig cfg;
    cfg.sketch_variant = SpinnerVariant::hd3_hd2_hd1;
    cfg.sketch_rows = 200;  // 4d
    cfg.max_iters = 50;
    cfg.gap_tolerance = 1e-6;
    cfg.seed = mix_seed(94, s);
    NewtonTrace t = solve(q, cfg);
    if (t.converged && t.gaps.back() <= 1e-6) ++converged;
  }
  if (converged < 9) ok = false;

  // Gradient vs central finite differences.
  LogisticProblem small = generate_ar1_problem(40, 5, 95);
  Rng rng(96);
  Eigen::VectorXd x(5);
  for (Eigen::Index i = 0; i < 5; ++i) x(i) = 0.3 * rng.gaussian();
  Eigen::VectorXd g = gradient(small, x);
  const double h = 1e-5;
  for (Eigen::Index j = 0; j < 5; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h;
    xm(j) -= h;
    const double fd = (loss(small, xp) - loss(small, xm)) / (2.0 * h);
    if (std::abs(g(j) - fd) / std::max(1.0, std::abs(g(j))) > 1e-5) ok = false;
  }
  std::cerr << "  exact iterations: " << et.iterates.size() << ", sketched converged: "
            << converged << "/10\n";
  report(6, "Newton-sketch convergence", ok);
}

TEST_CASE("criterion 7: adaptive fit") {
  const std::size_t n = 32, m = 4, d = 4;
  std::size_t good = 0;
  for (std::uint64_t s = 0; s < 20; ++s) {
    auto proto = StructuredSpinner::build(
        SpinnerSpec::make(SpinnerVariant::hd3_hd2_hd1, n, m, mix_seed(97, s)));
    Rng rng(mix_seed(98, s));
    Eigen::MatrixXd target(m, n);
    for (Eigen::Index i = 0; i < target.rows(); ++i)
      for (Eigen::Index j = 0; j < target.cols(); ++j) target(i, j) = rng.gaussian();
    // Orthonormal basis from Gram-Schmidt on Gaussian draws.
    std::vector<Vec64> basis;
    while (basis.size() < d) {
      Vec64 v = oracles::random_vec(n, mix_seed(99, s * 10 + basis.size()));
      for (const auto& b : basis) {
        double dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += v[i] * b[i];
        for (std::size_t i = 0; i < n; ++i) v[i] -= dot * b[i];
      }
      double norm = 0.0;
      for (double e : v) norm += e * e;
      norm = std::sqrt(norm);
      for (double& e : v) e /= norm;
      basis.push_back(std::move(v));
    }
    try {
      FitResult fit = fit_to_target(proto, target, basis);
      if (fit.residual <= 1e-8) ++good;
    } catch (const SingularSystemError&) {
    }
  }
  bool ok = good >= 19;

  // Rank-deficient path: m*d > n must raise.
  auto proto = StructuredSpinner::build(
      SpinnerSpec::make(SpinnerVariant::hd3_hd2_hd1, 16, 4, 100));
  std::vector<Vec64> big_basis(5, Vec64(16, 0.0));
  for (std::size_t i = 0; i < 5; ++i) big_basis[i][i] = 1.0;
  bool raised = false;
  try {
    fit_to_target(proto, Eigen::MatrixXd::Zero(4, 16), big_basis);
  } catch (const SingularSystemError&) {
    raised = true;
  }
  if (!raised) ok = false;
  std::cerr << "  fit residual successes: " << good << "/20\n";
  report(7, "adaptive fit", ok);
}

TEST_CASE("criterion 8: covariance and KS diagnostics") {
  std::vector<Vec64> basis = {Vec64(256, 0.0), Vec64(256, 0.0)};
  basis[0][0] = 1.0;
  basis[1][3] = 1.0;
  CovarianceReport cov =
      projection_covariance(SpinnerVariant::hd3_hd2_hd1, 256, 8, basis, 20000, 101);
  bool ok = cov.max_diag_deviation <= 0.1 && cov.max_off_diagonal <= 0.1;

  const std::size_t n = 1024, samples = 5000;
  Vec64 x = oracles::random_unit_vec(n, 102);
  std::vector<double> dense_draws(samples), structured_draws(samples);
  for (std::uint64_t s = 0; s < samples; ++s) {
    dense_draws[s] = StructuredSpinner::build(
        SpinnerSpec::make(SpinnerVariant::gaussian_dense, n, 1, mix_seed(103, s))).apply(x)[0];
    structured_draws[s] = StructuredSpinner::build(
        SpinnerSpec::make(SpinnerVariant::hd3_hd2_hd1, n, 1, mix_seed(104, s))).apply(x)[0];
  }
  const double ks = ks_distance(dense_draws, structured_draws);
  if (ks > 0.03) ok = false;
  std::cerr << "  max off-diagonal: " << cov.max_off_diagonal << ", ks: " << ks << "\n";
  report(8, "covariance and KS diagnostics", ok);
}

TEST_CASE("criterion 9: performance trend") {
  std::vector<std::size_t> sizes;
  for (std::size_t p = 10; p <= 15; ++p) sizes.push_back(std::size_t{1} << p);
  auto rows = bench_matvec(SpinnerVariant::hd3_hd2_hd1, sizes, 11, 105);

  bool ok = true;
  std::vector<double> structured_t, dense_t;
  double speedup_13 = 0.0;
  for (const auto& r : rows) {
    structured_t.push_back(r.structured_ns);
    dense_t.push_back(r.dense_ns);
    if (r.n == (std::size_t{1} << 13)) speedup_13 = r.speedup;
  }
  if (speedup_13 < 10.0) ok = false;
  const double s_slope = log_log_slope(sizes, structured_t);
  const double d_slope = log_log_slope(sizes, dense_t);
  if (s_slope > 1.3) ok = false;
  if (d_slope < 1.8) ok = false;
  std::cerr << "  speedup at 2^13: " << speedup_13 << ", slopes structured " << s_slope
            << " dense " << d_slope << "\n";
  report(9, "performance trend", ok);
}

namespace {

std::string run_cli(const std::string& args, const std::string& out_path, bool* success) {
  const std::string cmd =
      std::string(SPINNERS_CLI_PATH) + " --out " + out_path + " " + args + " 2>/dev/null";
  if (std::system(cmd.c_str()) != 0) {
    *success = false;
    return {};
  }
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Strip a trailing CSV column (wall-clock timings) from every line.
std::string drop_last_column(const std::string& text) {
  std::stringstream in(text), out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') {
      const auto pos = line.rfind(',');
      if (pos != std::string::npos) line.erase(pos);
    }
    out << line << '\n';
  }
  return out.str();
}

}  // namespace

TEST_CASE("criterion 10: CLI reproducibility") {
  struct Replay {
    std::string args;
    bool strip_timing;
  };
  const std::vector<Replay> replays = {
      {"kernel-approx --variant GcircD2HD1 --kernel gaussian --sigma 8 --features 16 "
       "--features 32 --seeds 3 --seed 5 --synth-dim 64 --synth-count 50", false},
      {"kernel-approx --variant HD3HD2HD1 --kernel angular --features 24 --seeds 2 --seed 6 "
       "--synth-dim 48 --synth-count 40 --pad", false},
      {"lsh-collision --variant HD3HD2HD1 --n 64 --rows 32 --pairs 200 --trials 5 --seed 3",
       false},
      {"lsh-compare --a GaussianDense --b GSkewCircD2HD1 --n 64 --rows 32 --pairs 200 "
       "--trials 5 --seed 7", false},
      {"fit --variant HD3HD2HD1 --n 32 --m 4 --d 4 --trials 5 --seed 2", false},
      {"diag balance --n 1024 --trials 500 --seed 4", false},
      {"diag covariance --variant HDgHD2HD1 --n 64 --m 4 --d 2 --resamples 2000 --seed 8",
       false},
      {"diag ks --a GaussianDense --b HD3HD2HD1 --n 256 --samples 500 --seed 9", false},
      {"newton-sketch --sketch HD3HD2HD1 --n 128 --d 8 --iters 10 --seed 6", true},
      {"newton-sketch --sketch Exact --n 128 --d 8 --iters 10 --seed 6", true},
  };

  bool ok = true;
  for (std::size_t i = 0; i < replays.size(); ++i) {
    bool ran = true;
    const std::string p1 = "/tmp/spinners_accept_a_" + std::to_string(i) + ".csv";
    const std::string p2 = "/tmp/spinners_accept_b_" + std::to_string(i) + ".csv";
    std::string a = run_cli(replays[i].args, p1, &ran);
    std::string b = run_cli(replays[i].args, p2, &ran);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
    if (!ran || a.empty()) {
      std::cerr << "  replay failed to run: " << replays[i].args << "\n";
      ok = false;
      continue;
    }
    if (replays[i].strip_timing) {
      a = drop_last_column(a);
      b = drop_last_column(b);
    }
    if (a != b) {
      std::cerr << "  replay mismatch: " << replays[i].args << "\n";
      ok = false;
    }
  }
  report(10, "CLI reproducibility", ok);
}
