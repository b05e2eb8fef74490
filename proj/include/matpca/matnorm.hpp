#pragma once

#include <Eigen/Dense>
#include <vector>

#include "matpca/dataset.hpp"
#include "matpca/errors.hpp"

namespace matpca {

// Matrix-normal parameters. Fits normalize trace(sigma_c) = d_c; the
// Kronecker product sigma_r (x) sigma_c is invariant to the compensating
// rescale of sigma_r.
struct MatNormalParams {
  Eigen::MatrixXd M;
  Eigen::MatrixXd sigma_c;  // d_c x d_c, symmetric positive definite
  Eigen::MatrixXd sigma_r;  // d_r x d_r, symmetric positive definite

  int d_c() const { return static_cast<int>(sigma_c.rows()); }
  int d_r() const { return static_cast<int>(sigma_r.rows()); }
};

// Leading factored principal components of a parameter pair.
struct FactoredPCs {
  Eigen::MatrixXd U_c;       // d_c x q_c, column-orthonormal
  Eigen::VectorXd lambda_c;  // q_c, descending positive
  Eigen::MatrixXd U_r;       // d_r x q_r
  Eigen::VectorXd lambda_r;  // q_r
};

// Cached Cholesky factorizations of a parameter pair; every inverse
// application in the library goes through these (never explicit inverses).
struct CovFactors {
  Eigen::LLT<Eigen::MatrixXd> llt_c;
  Eigen::LLT<Eigen::MatrixXd> llt_r;
  double logdet_c = 0.0;
  double logdet_r = 0.0;
};

// Throws NumericalError when either covariance fails to factor or its
// smallest Cholesky pivot falls below 1e-12 times the largest.
CovFactors factorize(const MatNormalParams& params, long iteration = -1);

// Squared matrix Mahalanobis distance tr{Sc^-1 (X-M) Sr^-1 (X-M)'},
// computed with triangular solves.
double mmd2(const Eigen::MatrixXd& X, const MatNormalParams& params);
double mmd2(const Eigen::MatrixXd& X, const MatNormalParams& params,
            const CovFactors& factors);

// Matrix-normal log-density.
double matnorm_logpdf(const Eigen::MatrixXd& X, const MatNormalParams& params);
double matnorm_logpdf(const Eigen::MatrixXd& X, const MatNormalParams& params,
                      const CovFactors& factors);

// Dense sigma_r (x) sigma_c under the column-major vec convention
// (vec stacks columns of X). Guarded testing/reporting aid.
Eigen::MatrixXd kron_covariance(const MatNormalParams& params, long guard = 4096);

// Minimal effective sample count for a well-posed fit.
int min_effective_count(int d_c, int d_r);

// Rescales (sigma_c, sigma_r) in place so trace(sigma_c) = d_c while keeping
// the Kronecker product unchanged.
void normalize_trace(MatNormalParams& params);

struct FlipflopResult {
  MatNormalParams params;
  int iterations = 0;
  std::vector<double> objective_trace;  // weighted log-likelihood per sweep
};

// Alternating ML fit. weights: optional per-observation nonnegative weights
// (binary or real); init: optional starting covariances (identity default).
// Convergence when |1 - L(t)/L(t+1)| < tol, at most max_iter sweeps. The
// returned params are trace-normalized.
FlipflopResult flipflop_fit(const MatrixDataset& data,
                            const std::vector<double>* weights = nullptr,
                            const MatNormalParams* init = nullptr,
                            double tol = 1e-8, int max_iter = 1000);

// Leading eigen-pairs of both covariances, descending; each eigenvector's
// largest-magnitude entry is made positive (ties broken by lowest index).
FactoredPCs eigendecompose_params(const MatNormalParams& params, int q_c, int q_r);

// Full descending spectrum and sign-fixed eigenvectors of one symmetric
// matrix (helper shared by eigendecompose_params and the scree data).
void symmetric_eigen_desc(const Eigen::MatrixXd& S, Eigen::VectorXd& values,
                          Eigen::MatrixXd& vectors);

}  // namespace matpca
