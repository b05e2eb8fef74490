#include "matpca/matnorm.hpp"

#include <cmath>
#include <string>

#include "matpca/kernels.hpp"

namespace matpca {

namespace {

constexpr double kPivotRatio = 1e-12;

// Cholesky with a relative pivot floor; logdet from the factor diagonal.
void factor_one(const Eigen::MatrixXd& S, Eigen::LLT<Eigen::MatrixXd>& llt,
                double& logdet, const char* which, long iteration) {
  llt.compute(S);
  if (llt.info() != Eigen::Success)
    throw NumericalError(std::string(which) + " covariance is not positive definite",
                         iteration);
  const auto& L = llt.matrixLLT();
  double min_p = L(0, 0), max_p = L(0, 0);
  logdet = 0.0;
  for (Eigen::Index i = 0; i < L.rows(); ++i) {
    double p = L(i, i);
    min_p = std::min(min_p, p);
    max_p = std::max(max_p, p);
    logdet += std::log(p);
  }
  logdet *= 2.0;
  if (!(min_p > 0.0) || min_p * min_p < kPivotRatio * max_p * max_p)
    throw NumericalError(std::string(which) +
                             " covariance is numerically singular (pivot ratio below 1e-12)",
                         iteration);
}

void check_params_shape(const Eigen::MatrixXd& X, const MatNormalParams& params) {
  if (X.rows() != params.M.rows() || X.cols() != params.M.cols())
    throw ShapeError("observation shape does not match the parameter mean");
  if (params.sigma_c.rows() != params.sigma_c.cols() ||
      params.sigma_r.rows() != params.sigma_r.cols() ||
      params.sigma_c.rows() != params.M.rows() ||
      params.sigma_r.rows() != params.M.cols())
    throw ShapeError("covariance shapes do not match the parameter mean");
}

}  // namespace

CovFactors factorize(const MatNormalParams& params, long iteration) {
  CovFactors f;
  factor_one(params.sigma_c, f.llt_c, f.logdet_c, "column", iteration);
  factor_one(params.sigma_r, f.llt_r, f.logdet_r, "row", iteration);
  return f;
}

double mmd2(const Eigen::MatrixXd& X, const MatNormalParams& params,
            const CovFactors& factors) {
  check_params_shape(X, params);
  Eigen::MatrixXd A = factors.llt_c.matrixL().solve(X - params.M);
  Eigen::MatrixXd C = factors.llt_r.matrixL().solve(A.transpose());
  return C.squaredNorm();
}

double mmd2(const Eigen::MatrixXd& X, const MatNormalParams& params) {
  return mmd2(X, params, factorize(params));
}

double matnorm_logpdf(const Eigen::MatrixXd& X, const MatNormalParams& params,
                      const CovFactors& factors) {
  const double d_c = static_cast<double>(params.d_c());
  const double d_r = static_cast<double>(params.d_r());
  return -0.5 * d_c * d_r * std::log(2.0 * M_PI) - 0.5 * d_r * factors.logdet_c -
         0.5 * d_c * factors.logdet_r - 0.5 * mmd2(X, params, factors);
}

double matnorm_logpdf(const Eigen::MatrixXd& X, const MatNormalParams& params) {
  return matnorm_logpdf(X, params, factorize(params));
}

Eigen::MatrixXd kron_covariance(const MatNormalParams& params, long guard) {
  const long d_c = params.d_c();
  const long d_r = params.d_r();
  if (d_c * d_r > guard)
    throw CapacityError("kron_covariance: " + std::to_string(d_c * d_r) +
                        " exceeds the guard of " + std::to_string(guard));
  Eigen::MatrixXd K(d_c * d_r, d_c * d_r);
  for (long i = 0; i < d_r; ++i)
    for (long j = 0; j < d_r; ++j)
      K.block(i * d_c, j * d_c, d_c, d_c) = params.sigma_r(i, j) * params.sigma_c;
  return K;
}

int min_effective_count(int d_c, int d_r) {
  // floor(d_c/d_r + d_r/d_c) + 2, exactly: (d_c^2 + d_r^2) / (d_c d_r) + 2.
  return static_cast<int>((static_cast<long>(d_c) * d_c + static_cast<long>(d_r) * d_r) /
                          (static_cast<long>(d_c) * d_r)) + 2;
}

void normalize_trace(MatNormalParams& params) {
  const double c = params.sigma_c.trace() / params.d_c();
  if (!(c > 0.0)) throw NumericalError("normalize_trace: nonpositive trace");
  params.sigma_c /= c;
  params.sigma_r *= c;
}

FlipflopResult flipflop_fit(const MatrixDataset& data,
                            const std::vector<double>* weights,
                            const MatNormalParams* init, double tol, int max_iter) {
  data.validate();
  if (tol <= 0.0) throw ArgumentError("flipflop_fit: tol must be positive");
  if (max_iter < 1) throw ArgumentError("flipflop_fit: max_iter must be at least 1");

  const int n = data.n();
  const int d_c = data.d_c;
  const int d_r = data.d_r;

  double W = 0.0;
  if (weights) {
    if (static_cast<int>(weights->size()) != n)
      throw ShapeError("flipflop_fit: weight vector length != n");
    for (double w : *weights) {
      if (w < 0.0 || !std::isfinite(w))
        throw ArgumentError("flipflop_fit: weights must be finite and nonnegative");
      W += w;
    }
  } else {
    W = static_cast<double>(n);
  }
  if (W < static_cast<double>(min_effective_count(d_c, d_r)))
    throw InsufficientDataError(
        "flipflop_fit: effective sample count " + std::to_string(W) +
        " below the minimum of " + std::to_string(min_effective_count(d_c, d_r)));

  // The mean has a closed form independent of the covariances.
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(d_c, d_r);
  for (int i = 0; i < n; ++i) {
    const double wi = weights ? (*weights)[i] : 1.0;
    if (wi != 0.0) M += wi * data.samples[i];
  }
  M /= W;

  MatNormalParams params;
  params.M = M;
  if (init) {
    if (init->sigma_c.rows() != d_c || init->sigma_r.rows() != d_r)
      throw ShapeError("flipflop_fit: init covariances have wrong shape");
    params.sigma_c = init->sigma_c;
    params.sigma_r = init->sigma_r;
  } else {
    params.sigma_c = Eigen::MatrixXd::Identity(d_c, d_c);
    params.sigma_r = Eigen::MatrixXd::Identity(d_r, d_r);
  }

  FlipflopResult res;
  res.params = params;

  // After a full sweep, sigma_r is proportional to the row scatter it was
  // built from, which makes the weighted sum of squared distances exactly
  // W * d_c * d_r. The sweep log-likelihood therefore reduces to a closed
  // form of the two log-determinants; no distance pass is required.
  Eigen::LLT<Eigen::MatrixXd> llt_r, llt_c;
  double ld_r = 0.0, ld_c = 0.0;
  factor_one(res.params.sigma_r, llt_r, ld_r, "row", 0);

  double prev_L = 0.0;
  int t = 0;
  for (t = 1; t <= max_iter; ++t) {
    res.params.sigma_c = scatter_col(data, M, llt_r, weights) / (W * d_r);
    factor_one(res.params.sigma_c, llt_c, ld_c, "column", t);
    res.params.sigma_r = scatter_row(data, M, llt_c, weights) / (W * d_c);
    factor_one(res.params.sigma_r, llt_r, ld_r, "row", t);

    const double L = -0.5 * W *
                     (d_c * d_r * std::log(2.0 * M_PI) + d_r * ld_c + d_c * ld_r +
                      static_cast<double>(d_c) * d_r);
    res.objective_trace.push_back(L);

    if (t >= 2 && std::abs(1.0 - prev_L / L) < tol) break;
    prev_L = L;
  }
  res.iterations = std::min(t, max_iter);
  normalize_trace(res.params);
  return res;
}

void symmetric_eigen_desc(const Eigen::MatrixXd& S, Eigen::VectorXd& values,
                          Eigen::MatrixXd& vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(S);
  if (solver.info() != Eigen::Success)
    throw NumericalError("symmetric eigendecomposition failed");
  const Eigen::Index d = S.rows();
  values.resize(d);
  vectors.resize(d, d);
  // Eigen returns ascending order; reverse to descending.
  for (Eigen::Index k = 0; k < d; ++k) {
    values[k] = solver.eigenvalues()[d - 1 - k];
    vectors.col(k) = solver.eigenvectors().col(d - 1 - k);
  }
  // Sign convention: the largest-magnitude entry of each eigenvector is
  // positive; on ties the lowest index wins.
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::Index arg = 0;
    double best = std::abs(vectors(0, k));
    for (Eigen::Index i = 1; i < d; ++i) {
      double v = std::abs(vectors(i, k));
      if (v > best) {
        best = v;
        arg = i;
      }
    }
    if (vectors(arg, k) < 0.0) vectors.col(k) = -vectors.col(k);
  }
}

FactoredPCs eigendecompose_params(const MatNormalParams& params, int q_c, int q_r) {
  if (q_c < 1 || q_c > params.d_c())
    throw ArgumentError("eigendecompose_params: q_c out of range");
  if (q_r < 1 || q_r > params.d_r())
    throw ArgumentError("eigendecompose_params: q_r out of range");

  Eigen::VectorXd wc, wr;
  Eigen::MatrixXd Vc, Vr;
  symmetric_eigen_desc(params.sigma_c, wc, Vc);
  symmetric_eigen_desc(params.sigma_r, wr, Vr);

  FactoredPCs pcs;
  pcs.U_c = Vc.leftCols(q_c);
  pcs.lambda_c = wc.head(q_c);
  pcs.U_r = Vr.leftCols(q_r);
  pcs.lambda_r = wr.head(q_r);
  return pcs;
}

}  // namespace matpca
