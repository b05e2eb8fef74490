#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "matpca/dataset.hpp"
#include "matpca/matnorm.hpp"

namespace matpca {

// Search schedule for the fast subset search. h <= 0 and
// initial_subset_size <= 0 select the defaults derived from the data shape.
struct MmcdConfig {
  int h = 0;                          // default: floor((n+d+2)/2)
  int n_starts = 500;
  int n_keep = 10;
  int initial_subset_size = 0;        // default: d + 2
  int cstep_inner_flipflop_iters = 2; // short concentration phase
  int final_flipflop_iters = 100;     // full-convergence phase
  int cstep_max = 100;
  double tol = 1e-8;
  std::uint64_t seed = 0;
};

struct MmcdFit {
  std::vector<int> subset;            // the selected h-subset, ascending
  MatNormalParams raw_params;         // subset fit, consistency-rescaled
  MatNormalParams reweighted_params;
  std::vector<int> weights;           // 0/1 per observation
  double raw_objective = 0.0;         // determinant objective of the subset fit
  std::vector<double> distances;      // mmd2 under reweighted_params
  MmcdConfig config_echo;
};

// Determinant objective d_c ln|sigma_r| + d_r ln|sigma_c|; invariant under
// the trace normalization.
double mmcd_objective(const MatNormalParams& params);
double mmcd_objective(int d_c, int d_r, const CovFactors& factors);

struct CStepResult {
  std::vector<int> subset;
  MatNormalParams params;
  double objective = 0.0;
};

// One concentration step: rank all observations by mmd2 under params, take
// the h smallest (ties by lower index), refit on that subset with at most
// inner_iters alternating sweeps.
CStepResult c_step(const MatrixDataset& data, const MatNormalParams& params,
                   int h, int inner_iters);

// Multi-start raw search. Deterministic given (data, config.seed), with
// candidate starts independent of evaluation order.
MmcdFit raw_mmcd(const MatrixDataset& data, const MmcdConfig& config = {});

// Reweighting refinement: keep observations whose raw distance falls under
// the chi-square cutoff, refit, rescale with alpha' = (kept count)/n.
// Populates the reweighted fields of fit in place.
void reweight_mmcd(const MatrixDataset& data, MmcdFit& fit, double alpha = 0.975);

// Subset-size default and the exact maximal breakdown fraction (as a
// numerator/denominator pair).
int default_h(int n, int d_c, int d_r);
std::pair<long, long> max_breakdown(int n, int d_c, int d_r);

// Global counter of concentration-step objective increases beyond tolerance
// (should stay zero); checked across the benchmark sweeps.
long long cstep_violation_count();
void reset_cstep_violation_count();

// Global counter of concentration chains that hit cstep_max without the
// subset repeating (should also stay zero).
long long cstep_nontermination_count();
void reset_cstep_nontermination_count();

}  // namespace matpca
