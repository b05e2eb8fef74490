#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "matpca/errors.hpp"
#include "matpca/rng.hpp"
#include "matpca/robust_stats.hpp"

#include "oracles.hpp"

using namespace matpca;

namespace {

double window_variance(const std::vector<double>& values, const std::vector<int>& idx) {
  double mean = 0.0;
  for (int i : idx) mean += values[static_cast<std::size_t>(i)];
  mean /= static_cast<double>(idx.size());
  double ss = 0.0;
  for (int i : idx) {
    double d = values[static_cast<std::size_t>(i)] - mean;
    ss += d * d;
  }
  return ss / static_cast<double>(idx.size() - 1);
}

}  // namespace

TEST_CASE("chi-square quantiles match frozen reference values") {
  // Reference values carry 15 significant digits.
  CHECK(chi2_quantile(3, 0.975) == doctest::Approx(9.34840360449615).epsilon(1e-9));
  CHECK(chi2_quantile(80, 0.975) == doctest::Approx(106.628567731666).epsilon(1e-9));
  CHECK(chi2_quantile(40, 0.975) == doctest::Approx(59.3417071431712).epsilon(1e-9));
  CHECK(chi2_quantile(6, 0.975) == doctest::Approx(14.4493753354479).epsilon(1e-9));
  CHECK(chi2_quantile(12, 0.975) == doctest::Approx(23.3366641586453).epsilon(1e-9));
  CHECK(chi2_quantile(1, 0.5) == doctest::Approx(0.454936423119572).epsilon(1e-9));
  CHECK(chi2_quantile(1, 0.975) == doctest::Approx(5.02388618731489).epsilon(1e-9));
  CHECK(chi2_quantile(2, 0.99) == doctest::Approx(9.21034037197618).epsilon(1e-9));
  CHECK(chi2_quantile(40, 0.5) == doctest::Approx(39.3353448466113).epsilon(1e-9));
  CHECK(chi2_quantile(5, 0.1) == doctest::Approx(1.61030798696232).epsilon(1e-9));
}

TEST_CASE("chi-square CDF matches frozen reference values") {
  CHECK(std::abs(chi2_cdf(9.3, 3) - 0.974442971892775) < 1e-12);
  CHECK(std::abs(chi2_cdf(106.6, 80) - 0.974890631098198) < 1e-12);
  CHECK(std::abs(chi2_cdf(0.45, 1) - 0.497665045639498) < 1e-12);
  CHECK(std::abs(chi2_cdf(2.5, 4) - 0.355364207064572) < 1e-12);
  CHECK(chi2_cdf(0.0, 3) == 0.0);
  CHECK(chi2_cdf(-1.0, 3) == 0.0);
}

TEST_CASE("chi-square CDF with two degrees of freedom is the exponential closed form") {
  for (double x : {0.1, 0.5, 1.0, 2.0, 5.0, 9.21034037197618, 20.0})
    CHECK(std::abs(chi2_cdf(x, 2) - (1.0 - std::exp(-x / 2.0))) < 1e-12);
}

TEST_CASE("chi-square quantile and CDF round-trip") {
  for (double df : {1.0, 2.0, 3.0, 5.0, 10.0, 12.0, 40.0, 80.0})
    for (double p : {0.01, 0.1, 0.5, 0.9, 0.975, 0.999}) {
      double x = chi2_quantile(df, p);
      CHECK(std::abs(chi2_cdf(x, df) - p) < 1e-8);
    }
}

TEST_CASE("standard normal quantile matches frozen reference values") {
  CHECK(std::abs(std_normal_quantile(0.975) - 1.95996398454005) < 1e-11);
  CHECK(std::abs(std_normal_quantile(0.999) - 3.09023230616781) < 1e-11);
  CHECK(std::abs(std_normal_quantile(0.25) - (-0.674489750196082)) < 1e-11);
  CHECK(std_normal_quantile(0.5) == 0.0);
}

TEST_CASE("standard normal quantile is antisymmetric and round-trips the CDF") {
  for (double p : {0.001, 0.01, 0.1, 0.25, 0.4, 0.49}) {
    CHECK(std::abs(std_normal_quantile(p) + std_normal_quantile(1.0 - p)) < 1e-10);
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(p)) - p) < 1e-9);
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(1.0 - p)) - (1.0 - p)) < 1e-9);
  }
  CHECK(std::abs(std_normal_cdf(0.0) - 0.5) < 1e-15);
}

TEST_CASE("consistency factor matches frozen values and is one at alpha = 1") {
  CHECK(consistency_factor(1.0, 1) == 1.0);
  CHECK(consistency_factor(1.0, 40) == 1.0);
  CHECK(consistency_factor(0.75, 40) == doctest::Approx(1.10974717406784).epsilon(1e-9));
  CHECK(consistency_factor(0.502, 40) == doctest::Approx(1.21437830615847).epsilon(1e-9));
  CHECK(consistency_factor(0.9, 6) == doctest::Approx(1.15779220214732).epsilon(1e-9));
}

TEST_CASE("consistency factor grows as more mass is trimmed") {
  double prev = 1.0;
  for (double alpha : {0.99, 0.9, 0.75, 0.6, 0.51}) {
    double cf = consistency_factor(alpha, 12);
    CHECK(cf > prev);
    prev = cf;
  }
}

TEST_CASE("consistency factor rejects alpha outside (0.5, 1]") {
  CHECK_THROWS_AS(consistency_factor(0.5, 3), ArgumentError);
  CHECK_THROWS_AS(consistency_factor(0.2, 3), ArgumentError);
  CHECK_THROWS_AS(consistency_factor(1.0001, 3), ArgumentError);
}

TEST_CASE("default univariate window size") {
  CHECK(default_univariate_h(4) == 3);
  CHECK(default_univariate_h(5) == 3);
  CHECK(default_univariate_h(10) == 6);
  CHECK(default_univariate_h(200) == 101);
  CHECK(default_univariate_h(1000) == 501);
}

TEST_CASE("univariate MCD on a point mass plus one outlier") {
  std::vector<double> values = {0.0, 0.0, 0.0, 0.0, 10.0};
  auto res = univariate_mcd(values, 4);
  CHECK(res.estimate.location == 0.0);
  CHECK(res.estimate.scale == 0.0);
  REQUIRE(res.subset.size() == 4);
  CHECK(res.subset == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("univariate MCD picks the tight window and rescales for consistency") {
  std::vector<double> values = {1.0, 2.0, 3.0, 100.0};
  auto res = univariate_mcd(values, 3);
  CHECK(res.estimate.location == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(res.estimate.scale ==
        doctest::Approx(1.0 * consistency_factor(0.75, 1)).epsilon(1e-12));
  CHECK(res.subset == std::vector<int>{0, 1, 2});
}

TEST_CASE("univariate MCD subset indices survive unsorted input") {
  std::vector<double> values = {100.0, 3.0, 1.0, 2.0};
  auto res = univariate_mcd(values, 3);
  CHECK(res.estimate.location == doctest::Approx(2.0).epsilon(1e-14));
  std::vector<int> subset = res.subset;
  std::sort(subset.begin(), subset.end());
  CHECK(subset == std::vector<int>{1, 2, 3});
}

TEST_CASE("univariate MCD equals the exhaustive minimum-variance subset") {
  for (int trial = 0; trial < 50; ++trial) {
    KeyedRng rng(42, 77, static_cast<std::uint64_t>(trial));
    int n = 5 + static_cast<int>(rng.next_u64() % 11);  // 5..15
    int h_lo = default_univariate_h(n);
    int h = h_lo + static_cast<int>(rng.next_u64() %
                                    static_cast<std::uint64_t>(n - h_lo + 1));
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = 10.0 * rng.normal();

    auto res = univariate_mcd(values, h);
    REQUIRE(static_cast<int>(res.subset.size()) == h);
    double got = window_variance(values, res.subset);

    double best = std::numeric_limits<double>::infinity();
    oracle::for_each_combination(n, h, [&](const std::vector<int>& idx) {
      best = std::min(best, window_variance(values, idx));
    });
    CHECK(got == doctest::Approx(best).epsilon(1e-12));
    CHECK(res.estimate.scale ==
          doctest::Approx(std::sqrt(got) *
                          consistency_factor(static_cast<double>(h) / n, 1))
              .epsilon(1e-12));
  }
}

TEST_CASE("univariate MCD is translation and scale equivariant") {
  std::vector<double> values = {0.3, -1.2, 4.5, 0.1, 2.2, 8.8, -0.4, 0.0, 1.1, 30.0};
  auto base = univariate_mcd(values, 7);
  const double s = 2.5, t = -7.0;
  std::vector<double> moved(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) moved[i] = s * values[i] + t;
  auto shifted = univariate_mcd(moved, 7);
  CHECK(shifted.estimate.location ==
        doctest::Approx(s * base.estimate.location + t).epsilon(1e-12));
  CHECK(shifted.estimate.scale ==
        doctest::Approx(s * base.estimate.scale).epsilon(1e-12));
  CHECK(shifted.subset == base.subset);
}

TEST_CASE("univariate MCD validates its window size") {
  std::vector<double> values = {1.0, 2.0, 3.0, 4.0, 5.0};
  CHECK_THROWS_AS(univariate_mcd(values, 2), ArgumentError);
  CHECK_THROWS_AS(univariate_mcd(values, 6), ArgumentError);
  CHECK_NOTHROW(univariate_mcd(values, 3));
  CHECK_NOTHROW(univariate_mcd(values));  // default h = 3
  std::vector<double> one = {1.0};
  CHECK_THROWS_AS(univariate_mcd(one), ArgumentError);
}
