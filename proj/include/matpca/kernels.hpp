#pragma once

#include <Eigen/Dense>
#include <vector>

#include "matpca/dataset.hpp"
#include "matpca/matnorm.hpp"

namespace matpca {

// Thread-count control for the parallel kernels. set_threads(0) restores the
// library default (all hardware threads). Results are independent of the
// thread count: reductions run over fixed 64-observation blocks whose
// partial sums are combined in index order.
void set_threads(int n);
int effective_threads();

// Column scatter: sum_i w_i (X_i - M) Sr^-1 (X_i - M)' over the given
// indices (all observations when idx is null). w may be null (all ones).
Eigen::MatrixXd scatter_col(const MatrixDataset& data, const Eigen::MatrixXd& M,
                            const Eigen::LLT<Eigen::MatrixXd>& llt_r,
                            const std::vector<double>* w = nullptr,
                            const std::vector<int>* idx = nullptr);

// Row scatter: sum_i w_i (X_i - M)' Sc^-1 (X_i - M).
Eigen::MatrixXd scatter_row(const MatrixDataset& data, const Eigen::MatrixXd& M,
                            const Eigen::LLT<Eigen::MatrixXd>& llt_c,
                            const std::vector<double>* w = nullptr,
                            const std::vector<int>* idx = nullptr);

// Squared matrix Mahalanobis distances for every observation.
std::vector<double> mmd2_batch(const MatrixDataset& data,
                               const MatNormalParams& params,
                               const CovFactors& factors);

// Plain single-threaded loops, kept as the reference implementation for
// correctness tests and the kernel benchmark.
Eigen::MatrixXd scatter_col_reference(const MatrixDataset& data,
                                      const Eigen::MatrixXd& M,
                                      const Eigen::LLT<Eigen::MatrixXd>& llt_r,
                                      const std::vector<double>* w = nullptr,
                                      const std::vector<int>* idx = nullptr);
Eigen::MatrixXd scatter_row_reference(const MatrixDataset& data,
                                      const Eigen::MatrixXd& M,
                                      const Eigen::LLT<Eigen::MatrixXd>& llt_c,
                                      const std::vector<double>* w = nullptr,
                                      const std::vector<int>* idx = nullptr);
std::vector<double> mmd2_batch_reference(const MatrixDataset& data,
                                         const MatNormalParams& params,
                                         const CovFactors& factors);

}  // namespace matpca
