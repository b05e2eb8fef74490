#include "matpca/kernels.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace matpca {

namespace {

int g_threads = 0;  // 0 = library default

constexpr int kBlock = 64;  // reduction block size (fixed for determinism)

inline int resolve_index(const std::vector<int>* idx, int k) {
  return idx ? (*idx)[k] : k;
}

inline int work_count(const MatrixDataset& data, const std::vector<int>* idx) {
  return idx ? static_cast<int>(idx->size()) : data.n();
}

}  // namespace

void set_threads(int n) { g_threads = n < 0 ? 0 : n; }

int effective_threads() {
  if (g_threads > 0) return g_threads;
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

// Both scatters accumulate per 64-observation block and then combine the
// block partials in index order, so the result is bitwise identical for any
// thread count (and matches the serial block loop).
Eigen::MatrixXd scatter_col(const MatrixDataset& data, const Eigen::MatrixXd& M,
                            const Eigen::LLT<Eigen::MatrixXd>& llt_r,
                            const std::vector<double>* w,
                            const std::vector<int>* idx) {
  const int m = work_count(data, idx);
  const int d_c = data.d_c;
  const int nblocks = (m + kBlock - 1) / kBlock;
  std::vector<Eigen::MatrixXd> partial(nblocks);

#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (int b = 0; b < nblocks; ++b) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d_c, d_c);
    Eigen::MatrixXd B;
    const int lo = b * kBlock;
    const int hi = std::min(m, lo + kBlock);
    for (int k = lo; k < hi; ++k) {
      const int i = resolve_index(idx, k);
      const double wi = w ? (*w)[i] : 1.0;
      if (wi == 0.0) continue;
      // (X-M) Sr^-1 (X-M)' = B'B with B = L^-1 (X-M)'.
      B = llt_r.matrixL().solve((data.samples[i] - M).transpose());
      acc.noalias() += wi * (B.transpose() * B);
    }
    partial[b] = std::move(acc);
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_c, d_c);
  for (int b = 0; b < nblocks; ++b) out += partial[b];
  return out;
}

Eigen::MatrixXd scatter_row(const MatrixDataset& data, const Eigen::MatrixXd& M,
                            const Eigen::LLT<Eigen::MatrixXd>& llt_c,
                            const std::vector<double>* w,
                            const std::vector<int>* idx) {
  const int m = work_count(data, idx);
  const int d_r = data.d_r;
  const int nblocks = (m + kBlock - 1) / kBlock;
  std::vector<Eigen::MatrixXd> partial(nblocks);

#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (int b = 0; b < nblocks; ++b) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(d_r, d_r);
    Eigen::MatrixXd B;
    const int lo = b * kBlock;
    const int hi = std::min(m, lo + kBlock);
    for (int k = lo; k < hi; ++k) {
      const int i = resolve_index(idx, k);
      const double wi = w ? (*w)[i] : 1.0;
      if (wi == 0.0) continue;
      // (X-M)' Sc^-1 (X-M) = B'B with B = L^-1 (X-M).
      B = llt_c.matrixL().solve(data.samples[i] - M);
      acc.noalias() += wi * (B.transpose() * B);
    }
    partial[b] = std::move(acc);
  }

  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(d_r, d_r);
  for (int b = 0; b < nblocks; ++b) out += partial[b];
  return out;
}

std::vector<double> mmd2_batch(const MatrixDataset& data,
                               const MatNormalParams& params,
                               const CovFactors& factors) {
  const int n = data.n();
  std::vector<double> out(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(static) num_threads(effective_threads())
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd A = factors.llt_c.matrixL().solve(data.samples[i] - params.M);
    Eigen::MatrixXd C = factors.llt_r.matrixL().solve(A.transpose());
    out[static_cast<std::size_t>(i)] = C.squaredNorm();
  }
  return out;
}

Eigen::MatrixXd scatter_col_reference(const MatrixDataset& data,
                                      const Eigen::MatrixXd& M,
                                      const Eigen::LLT<Eigen::MatrixXd>& llt_r,
                                      const std::vector<double>* w,
                                      const std::vector<int>* idx) {
  const int m = work_count(data, idx);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(data.d_c, data.d_c);
  for (int k = 0; k < m; ++k) {
    const int i = resolve_index(idx, k);
    const double wi = w ? (*w)[i] : 1.0;
    if (wi == 0.0) continue;
    Eigen::MatrixXd B = llt_r.matrixL().solve((data.samples[i] - M).transpose());
    acc.noalias() += wi * (B.transpose() * B);
  }
  return acc;
}

Eigen::MatrixXd scatter_row_reference(const MatrixDataset& data,
                                      const Eigen::MatrixXd& M,
                                      const Eigen::LLT<Eigen::MatrixXd>& llt_c,
                                      const std::vector<double>* w,
                                      const std::vector<int>* idx) {
  const int m = work_count(data, idx);
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(data.d_r, data.d_r);
  for (int k = 0; k < m; ++k) {
    const int i = resolve_index(idx, k);
    const double wi = w ? (*w)[i] : 1.0;
    if (wi == 0.0) continue;
    Eigen::MatrixXd B = llt_c.matrixL().solve(data.samples[i] - M);
    acc.noalias() += wi * (B.transpose() * B);
  }
  return acc;
}

std::vector<double> mmd2_batch_reference(const MatrixDataset& data,
                                         const MatNormalParams& params,
                                         const CovFactors& factors) {
  const int n = data.n();
  std::vector<double> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd A = factors.llt_c.matrixL().solve(data.samples[i] - params.M);
    Eigen::MatrixXd C = factors.llt_r.matrixL().solve(A.transpose());
    out[static_cast<std::size_t>(i)] = C.squaredNorm();
  }
  return out;
}

}  // namespace matpca
