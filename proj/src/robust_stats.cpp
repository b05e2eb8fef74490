#include "matpca/robust_stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "matpca/errors.hpp"

namespace matpca {

namespace {

constexpr double kEps = 3e-16;
constexpr int kMaxGammaIter = 500;

// Series expansion of P(a, x), valid/fast for x < a + 1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < kMaxGammaIter; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * kEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Lentz continued fraction for Q(a, x), valid/fast for x >= a + 1.
double gamma_q_contfrac(double a, double x) {
  const double fpmin = std::numeric_limits<double>::min() / kEps;
  double b = x + 1.0 - a;
  double c = 1.0 / fpmin;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxGammaIter; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < fpmin) d = fpmin;
    c = b + an / c;
    if (std::abs(c) < fpmin) c = fpmin;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double lower_gamma_regularized(double a, double x) {
  if (a <= 0.0) throw ArgumentError("lower_gamma_regularized: a must be positive");
  if (x < 0.0) throw ArgumentError("lower_gamma_regularized: x must be nonnegative");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_cdf(double x, double df) {
  if (df <= 0.0) throw ArgumentError("chi2_cdf: df must be positive");
  if (x <= 0.0) return 0.0;
  return lower_gamma_regularized(0.5 * df, 0.5 * x);
}

double chi2_quantile(double df, double p) {
  if (df <= 0.0) throw ArgumentError("chi2_quantile: df must be positive");
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("chi2_quantile: p must lie in (0, 1)");

  // Wilson-Hilferty starting guess, then expand to a bracketing interval.
  double z = std_normal_quantile(p);
  double t = 1.0 - 2.0 / (9.0 * df) + z * std::sqrt(2.0 / (9.0 * df));
  double guess = df * t * t * t;
  if (!(guess > 0.0) || !std::isfinite(guess)) guess = df;

  double lo = guess, hi = guess;
  while (chi2_cdf(lo, df) > p && lo > 1e-300) lo *= 0.5;
  while (chi2_cdf(hi, df) < p) {
    hi *= 2.0;
    if (hi > 1e300) throw NumericalError("chi2_quantile: bracketing failed");
  }
  if (chi2_cdf(lo, df) > p) lo = 0.0;

  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (chi2_cdf(mid, df) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ArgumentError("std_normal_quantile: p must lie in (0, 1)");

  // Acklam's rational approximation (central and tail regions).
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  double x;
  if (p < p_low) {
    double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    double q = p - 0.5;
    double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Two Halley/Newton refinements against the erfc-based CDF.
  for (int i = 0; i < 2; ++i) {
    double e = std_normal_cdf(x) - p;
    double u = e * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

double consistency_factor(double alpha, int p_dim) {
  if (p_dim < 1) throw ArgumentError("consistency_factor: p_dim must be positive");
  if (!(alpha > 0.5 && alpha <= 1.0))
    throw ArgumentError("consistency_factor: alpha must lie in (0.5, 1]");
  if (alpha == 1.0) return 1.0;
  double q = chi2_quantile(static_cast<double>(p_dim), alpha);
  return alpha / chi2_cdf(q, static_cast<double>(p_dim) + 2.0);
}

int default_univariate_h(int n) { return (n + 2) / 2; }

UnivariateMcdResult univariate_mcd(const std::vector<double>& values) {
  return univariate_mcd(values, default_univariate_h(static_cast<int>(values.size())));
}

UnivariateMcdResult univariate_mcd(const std::vector<double>& values, int h) {
  const int n = static_cast<int>(values.size());
  if (n < 2) throw ArgumentError("univariate_mcd: need at least two values");
  const int h_min = (n + 2) / 2;  // maximal-breakdown window, floor((n+2)/2)
  if (h < h_min || h > n)
    throw ArgumentError("univariate_mcd: h = " + std::to_string(h) +
                        " out of range [" + std::to_string(h_min) + ", " +
                        std::to_string(n) + "]");

  // Stable sort of (value, original index) so ties keep input order and the
  // reported subset maps back to the caller's indices.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int i, int j) { return values[i] < values[j]; });
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) s[i] = values[order[i]];

  // Two-pass variance per window. O(n*h) total, which is cheap at the sizes
  // this estimator sees, and avoids prefix-sum cancellation so that exact
  // ties resolve deterministically to the smallest start index.
  auto window_moments = [&](int start, double& mean, double& var) {
    double sum = 0.0;
    for (int i = start; i < start + h; ++i) sum += s[i];
    mean = sum / h;
    double ss = 0.0;
    for (int i = start; i < start + h; ++i) {
      double dd = s[i] - mean;
      ss += dd * dd;
    }
    var = ss / (h - 1);
  };

  int best_start = 0;
  double best_var = std::numeric_limits<double>::infinity();
  for (int start = 0; start + h <= n; ++start) {
    double mean, var;
    window_moments(start, mean, var);
    if (var < best_var) {
      best_var = var;
      best_start = start;
    }
  }

  double mean, var;
  window_moments(best_start, mean, var);
  double sd = std::sqrt(var);

  UnivariateMcdResult out;
  out.estimate.location = mean;
  out.estimate.scale = sd * consistency_factor(static_cast<double>(h) / n, 1);
  out.subset.assign(order.begin() + best_start, order.begin() + best_start + h);
  std::sort(out.subset.begin(), out.subset.end());
  return out;
}

}  // namespace matpca
