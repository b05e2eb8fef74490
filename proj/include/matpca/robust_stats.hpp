#pragma once

#include <vector>

namespace matpca {

struct LocationScale {
  double location = 0.0;
  double scale = 0.0;
};

// Regularized lower incomplete gamma function P(a, x); series expansion for
// x < a + 1, Lentz continued fraction otherwise.
double lower_gamma_regularized(double a, double x);

// Chi-square CDF / quantile. Quantile is solved by bracketing plus bisection
// from a Wilson-Hilferty starting guess; relative accuracy ~1e-12.
double chi2_cdf(double x, double df);
double chi2_quantile(double df, double p);

// Standard normal CDF (erfc-based) and quantile (rational approximation with
// Newton refinement; absolute error < 1e-12).
double std_normal_cdf(double x);
double std_normal_quantile(double p);

// Consistency correction for trimmed covariance estimates:
//   alpha / chi2_cdf(chi2_quantile(p_dim, alpha), p_dim + 2)
// Equals 1 at alpha = 1. Requires 0.5 < alpha <= 1.
double consistency_factor(double alpha, int p_dim);

// Exact univariate MCD by the sorted contiguous-window sweep. Among all
// windows of length h in the sorted values, picks the one with minimal
// sample variance (1/(h-1) denominator), ties broken by the smallest window
// start. The scale is multiplied by consistency_factor(h/n, 1). The subset
// contains the original indices of the selected window.
struct UnivariateMcdResult {
  LocationScale estimate;
  std::vector<int> subset;
};
UnivariateMcdResult univariate_mcd(const std::vector<double>& values, int h);
UnivariateMcdResult univariate_mcd(const std::vector<double>& values);  // default h

// Default window size: floor((n+2)/2), the maximal-breakdown choice.
int default_univariate_h(int n);

}  // namespace matpca
