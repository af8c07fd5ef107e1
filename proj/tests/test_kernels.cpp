#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinners/kernels.hpp"

using namespace spinners;

namespace {

FeatureMap make_map(SpinnerVariant v, std::size_t n, std::size_t dprime, KernelKind kind,
                    std::uint64_t seed) {
  return FeatureMap{StackedSpinner(v, n, std::min(n, dprime), dprime, seed), kind};
}

}  // namespace

TEST_CASE("angular embedding is scale invariant; zero vector rejected") {
  auto fm = make_map(SpinnerVariant::hd3_hd2_hd1, 8, 8, KernelKind::angular(), 1);
  Vec64 x = oracles::random_vec(8, 2);
  Vec64 x2(8);
  for (std::size_t i = 0; i < 8; ++i) x2[i] = 2.0 * x[i];
  CHECK(embed(fm, x) == embed(fm, x2));
  CHECK_THROWS_AS(embed(fm, Vec64(8, 0.0)), DomainError);
}

TEST_CASE("gaussian embedding has unit self-similarity") {
  auto fm = make_map(SpinnerVariant::gaussian_dense, 8, 16, KernelKind::gaussian(2.0), 3);
  Vec64 e = embed(fm, oracles::random_vec(8, 4));
  double dot = 0.0;
  for (double v : e) dot += v * v;
  CHECK(dot == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("gaussian embedding dot product equals the cosine-difference form") {
  const double sigma = 1.5;
  auto fm = make_map(SpinnerVariant::gaussian_dense, 4, 4, KernelKind::gaussian(sigma), 5);
  Vec64 x = oracles::random_vec(4, 6);
  Vec64 y = oracles::random_vec(4, 7);
  Vec64 ex = embed(fm, x);
  Vec64 ey = embed(fm, y);
  double dot = 0.0;
  for (std::size_t i = 0; i < ex.size(); ++i) dot += ex[i] * ey[i];

  Vec64 diff(4);
  for (std::size_t i = 0; i < 4; ++i) diff[i] = x[i] - y[i];
  Vec64 pd = fm.projector.apply(diff);
  double want = 0.0;
  for (double v : pd) want += std::cos(v / sigma);
  want /= static_cast<double>(pd.size());
  CHECK(dot == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("gram_exact anchors") {
  Vec64 a = {1.0, 0.0};
  Vec64 b = {0.0, 1.0};
  auto k_ang = gram_exact({a, a, b}, KernelKind::angular());
  CHECK(k_ang(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(k_ang(0, 2) == doctest::Approx(0.5).epsilon(1e-15));

  const double sigma = 0.7;
  Vec64 c = {sigma * std::sqrt(2.0), 0.0};
  auto k_g = gram_exact({Vec64{0.0, 0.0}, c}, KernelKind::gaussian(sigma));
  CHECK(k_g(0, 0) == 1.0);
  CHECK(k_g(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-13));

  CHECK_THROWS_AS(gram_exact({Vec64{0.0, 0.0}}, KernelKind::angular()), DomainError);
}

TEST_CASE("gram_approx: diagonal 1, antipodal angular points, symmetry") {
  auto fm = make_map(SpinnerVariant::gcirc_d2_hd1, 8, 8, KernelKind::angular(), 8);
  Vec64 x = oracles::random_vec(8, 9);
  Vec64 neg(8);
  for (std::size_t i = 0; i < 8; ++i) neg[i] = -x[i];
  auto k = gram_approx(fm, {x, neg});
  CHECK(k(0, 0) == 1.0);
  CHECK(k(1, 1) == 1.0);
  CHECK(k(0, 1) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(k(0, 1) == k(1, 0));
}

TEST_CASE("gram_approx matches an independent scalar implementation") {
  const std::size_t n = 8, dprime = 8;
  std::vector<Vec64> pts = {oracles::random_vec(n, 10), oracles::random_vec(n, 11),
                            oracles::random_vec(n, 12)};

  // Angular via explicit per-pair Hamming count.
  auto fm_a = make_map(SpinnerVariant::hd3_hd2_hd1, n, dprime, KernelKind::angular(), 13);
  auto got_a = gram_approx(fm_a, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      Vec64 pi = fm_a.projector.apply(pts[i]);
      Vec64 pj = fm_a.projector.apply(pts[j]);
      std::size_t hamming = 0;
      for (std::size_t t = 0; t < dprime; ++t) {
        const double si = pi[t] < 0.0 ? -1.0 : 1.0;
        const double sj = pj[t] < 0.0 ? -1.0 : 1.0;
        if (si != sj) ++hamming;
      }
      const double want = 1.0 - static_cast<double>(hamming) / static_cast<double>(dprime);
      CHECK(got_a(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
  }

  // Gaussian via explicit scalar sums of cos/sin features.
  const double sigma = 2.0;
  auto fm_g = make_map(SpinnerVariant::gaussian_dense, n, dprime, KernelKind::gaussian(sigma), 14);
  auto got_g = gram_approx(fm_g, pts);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j) continue;
      Vec64 pi = fm_g.projector.apply(pts[i]);
      Vec64 pj = fm_g.projector.apply(pts[j]);
      double want = 0.0;
      for (std::size_t t = 0; t < dprime; ++t)
        want += std::cos(pi[t] / sigma) * std::cos(pj[t] / sigma) +
                std::sin(pi[t] / sigma) * std::sin(pj[t] / sigma);
      want /= static_cast<double>(dprime);
      CHECK(got_g(i, j) == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("gram_error anchors") {
  Eigen::MatrixXd k = Eigen::MatrixXd::Identity(2, 2);
  CHECK(gram_error(k, k) == 0.0);
  CHECK(gram_error(k, Eigen::MatrixXd::Zero(2, 2)) == doctest::Approx(1.0).epsilon(1e-15));
  Eigen::MatrixXd kt = k;
  kt(0, 1) = 0.1;
  kt(1, 0) = 0.1;
  CHECK(gram_error(k, kt) == doctest::Approx(0.1).epsilon(1e-13));
  CHECK_THROWS_AS(gram_error(Eigen::MatrixXd::Zero(2, 2), k), DomainError);
}

TEST_CASE("unbiasedness of single-feature estimators over projector draws") {
  const std::size_t n = 8;
  // Three pairs spanning theta in {pi/6, pi/2, 5pi/6}.
  for (double theta : {M_PI / 6.0, M_PI / 2.0, 5.0 * M_PI / 6.0}) {
    Vec64 x(n, 0.0), y(n, 0.0);
    x[0] = 1.0;
    y[0] = std::cos(theta);
    y[1] = std::sin(theta);

    double sum_ang = 0.0, sum_gauss = 0.0;
    const std::size_t draws = 10000;
    const double sigma = 1.0;
    for (std::uint64_t s = 0; s < draws; ++s) {
      auto fm_a = make_map(SpinnerVariant::gaussian_dense, n, 1, KernelKind::angular(),
                           mix_seed(400, s));
      sum_ang += gram_approx(fm_a, {x, y})(0, 1);
      auto fm_g = make_map(SpinnerVariant::gaussian_dense, n, 1, KernelKind::gaussian(sigma),
                           mix_seed(500, s));
      sum_gauss += gram_approx(fm_g, {x, y})(0, 1);
    }
    const double mean_ang = sum_ang / draws;
    const double mean_gauss = sum_gauss / draws;
    CHECK(std::abs(mean_ang - (1.0 - theta / M_PI)) < 0.02);

    double d2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    const double exact = std::exp(-d2 / (2.0 * sigma * sigma));
    CHECK(std::abs(mean_gauss - exact) < 0.02);
  }
}
