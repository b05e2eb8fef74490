#pragma once

// Monte-Carlo benchmark: contaminated populations, repeated fits under each
// method, relative-difference summaries per (kind, situation, proportion)
// cell. Cells and reps are independently seeded so the sweep can be
// reordered or parallelized without changing a single output byte.

#include <cstdint>
#include <string>
#include <vector>

#include "matpca/datagen.hpp"
#include "matpca/hrfpca.hpp"
#include "matpca/mmcd.hpp"

namespace matpca {

struct BenchOptions {
  std::string population = "data1";
  std::vector<OutlierKind> kinds = {OutlierKind::kPc};
  std::vector<Situation> sits = {Situation::kSitI};
  std::vector<double> props = {0.1};
  int reps = 50;
  std::vector<Method> methods = {Method::kHrfpca, Method::kFpca};
  std::uint64_t seed = 0;
  MmcdConfig mmcd;      // template; the per-rep seed overrides mmcd.seed
  bool use_raw = false; // score the raw (pre-reweighting) MMCD estimates
  bool knn = false;     // append a leave-one-out 1-NN outlier-label error column
};

struct BenchCellResult {
  OutlierKind kind = OutlierKind::kPc;
  Situation sit = Situation::kSitI;
  double p = 0.0;
  Method method = Method::kHrfpca;
  std::vector<double> reldiff;  // one entry per rep; NaN marks a failed rep
  std::vector<double> knn_err;  // filled only when BenchOptions::knn is set
  std::string note;             // first failure message, empty otherwise

  double mean_reldiff() const;
  double sd_reldiff() const;
};

// Deterministic per-rep seed from the cell coordinates.
std::uint64_t bench_rep_seed(std::uint64_t master, OutlierKind kind, Situation sit,
                             double p, int rep);

std::vector<BenchCellResult> run_benchmark(const BenchOptions& options);

// CSV with header kind,sit,p,method,mean_reldiff,sd_reldiff,reps,seed,note
// (plus knn_err when requested); floats at 17 significant digits.
std::string benchmark_csv(const std::vector<BenchCellResult>& cells, int reps,
                          std::uint64_t seed, bool knn);

}  // namespace matpca
