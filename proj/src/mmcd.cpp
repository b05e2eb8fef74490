#include "matpca/mmcd.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "matpca/kernels.hpp"
#include "matpca/rng.hpp"
#include "matpca/robust_stats.hpp"

namespace matpca {

namespace {

std::atomic<long long> g_cstep_violations{0};
std::atomic<long long> g_cstep_nonterminations{0};

int shape_d(int d_c, int d_r) {
  return static_cast<int>((static_cast<long>(d_c) * d_c + static_cast<long>(d_r) * d_r) /
                          (static_cast<long>(d_c) * d_r));
}

// h smallest distances, ties by lower index: stable selection via
// nth_element on (distance, index) pairs.
std::vector<int> smallest_h(const std::vector<double>& d2, int h) {
  const int n = static_cast<int>(d2.size());
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto cmp = [&](int a, int b) {
    if (d2[a] != d2[b]) return d2[a] < d2[b];
    return a < b;
  };
  std::nth_element(order.begin(), order.begin() + h, order.end(), cmp);
  order.resize(h);
  std::sort(order.begin(), order.end());
  return order;
}

std::vector<double> subset_weights(int n, const std::vector<int>& subset) {
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  for (int i : subset) w[static_cast<std::size_t>(i)] = 1.0;
  return w;
}

struct Candidate {
  bool valid = false;
  double objective = std::numeric_limits<double>::infinity();
  std::vector<int> subset;
  MatNormalParams params;
};

}  // namespace

double mmcd_objective(int d_c, int d_r, const CovFactors& factors) {
  return d_c * factors.logdet_r + d_r * factors.logdet_c;
}

double mmcd_objective(const MatNormalParams& params) {
  CovFactors f = factorize(params);
  return mmcd_objective(params.d_c(), params.d_r(), f);
}

int default_h(int n, int d_c, int d_r) {
  return (n + shape_d(d_c, d_r) + 2) / 2;
}

std::pair<long, long> max_breakdown(int n, int d_c, int d_r) {
  const long d = shape_d(d_c, d_r);
  return {(static_cast<long>(n) - d) / 2, static_cast<long>(n)};
}

long long cstep_violation_count() { return g_cstep_violations.load(); }
void reset_cstep_violation_count() { g_cstep_violations.store(0); }

long long cstep_nontermination_count() { return g_cstep_nonterminations.load(); }
void reset_cstep_nontermination_count() { g_cstep_nonterminations.store(0); }

CStepResult c_step(const MatrixDataset& data, const MatNormalParams& params,
                   int h, int inner_iters) {
  const int n = data.n();
  if (h <= n / 2 || h > n) throw ArgumentError("c_step: h out of range (n/2, n]");

  CovFactors f = factorize(params);
  std::vector<double> d2 = mmd2_batch(data, params, f);
  CStepResult out;
  out.subset = smallest_h(d2, h);

  std::vector<double> w = subset_weights(n, out.subset);
  // Tight tolerance: the monotonicity of the concentration chain is only
  // guaranteed between (near-)converged subset fits, so leftover fit error
  // must stay well below the 1e-9 violation threshold.
  FlipflopResult fit = flipflop_fit(data, &w, nullptr, 1e-12, inner_iters);
  out.params = fit.params;
  CovFactors f2 = factorize(out.params);
  out.objective = mmcd_objective(data.d_c, data.d_r, f2);
  return out;
}

MmcdFit raw_mmcd(const MatrixDataset& data, const MmcdConfig& config) {
  data.validate();
  const int n = data.n();
  const int d_c = data.d_c;
  const int d_r = data.d_r;
  const int d = shape_d(d_c, d_r);

  MmcdConfig cfg = config;
  if (cfg.h <= 0) cfg.h = default_h(n, d_c, d_r);
  if (cfg.initial_subset_size <= 0) cfg.initial_subset_size = d + 2;
  if (!(cfg.h > n / 2 && cfg.h <= n))
    throw ArgumentError("raw_mmcd: h = " + std::to_string(cfg.h) +
                        " must satisfy n/2 < h <= n");
  if (cfg.h < d + 2)
    throw ArgumentError("raw_mmcd: h below the minimum of " + std::to_string(d + 2));
  if (cfg.n_starts < 1 || cfg.n_keep < 1)
    throw ArgumentError("raw_mmcd: n_starts and n_keep must be positive");
  if (cfg.n_keep > cfg.n_starts) cfg.n_keep = cfg.n_starts;
  if (cfg.initial_subset_size < d + 2 || cfg.initial_subset_size > n)
    throw ArgumentError("raw_mmcd: initial subset size out of range");

  // Phase 1: elemental starts, each concentrated by two short C-steps.
  // Starts are independent; results land in a per-start slot so the outcome
  // does not depend on scheduling.
  std::vector<Candidate> cand(static_cast<std::size_t>(cfg.n_starts));

#pragma omp parallel for schedule(dynamic) num_threads(effective_threads())
  for (int s = 0; s < cfg.n_starts; ++s) {
    KeyedRng rng(cfg.seed, kStreamStart, static_cast<std::uint64_t>(s));
    Candidate c;
    for (int attempt = 0; attempt < 10 && !c.valid; ++attempt) {
      std::vector<int> sub = rng.sample_without_replacement(n, cfg.initial_subset_size);
      std::sort(sub.begin(), sub.end());
      try {
        std::vector<double> w = subset_weights(n, sub);
        FlipflopResult init = flipflop_fit(data, &w, nullptr, cfg.tol, 100);
        MatNormalParams params = init.params;
        double obj = std::numeric_limits<double>::infinity();
        std::vector<int> subset = sub;
        for (int step = 0; step < 2; ++step) {
          CStepResult cs = c_step(data, params, cfg.h, cfg.cstep_inner_flipflop_iters);
          params = cs.params;
          subset = cs.subset;
          obj = cs.objective;
        }
        c.valid = true;
        c.objective = obj;
        c.subset = std::move(subset);
        c.params = std::move(params);
      } catch (const NumericalError&) {
        // singular elemental fit: resample and retry
      } catch (const InsufficientDataError&) {
      }
    }
    cand[static_cast<std::size_t>(s)] = std::move(c);
  }

  // Keep the n_keep best candidates by (objective, start index).
  std::vector<int> keep;
  for (int s = 0; s < cfg.n_starts; ++s)
    if (cand[static_cast<std::size_t>(s)].valid) keep.push_back(s);
  if (keep.empty())
    throw EstimationError("raw_mmcd: every candidate start was singular; the data "
                          "may be degenerate or n too small");
  std::stable_sort(keep.begin(), keep.end(), [&](int a, int b) {
    return cand[static_cast<std::size_t>(a)].objective <
           cand[static_cast<std::size_t>(b)].objective;
  });
  if (static_cast<int>(keep.size()) > cfg.n_keep) keep.resize(cfg.n_keep);

  // Phase 2: full concentration until the subset repeats.
  Candidate best;
#pragma omp parallel for schedule(dynamic) num_threads(effective_threads())
  for (int k = 0; k < static_cast<int>(keep.size()); ++k) {
    Candidate& c = cand[static_cast<std::size_t>(keep[static_cast<std::size_t>(k)])];
    double prev_obj = c.objective;
    bool settled = false;
    try {
      for (int step = 0; step < cfg.cstep_max; ++step) {
        CStepResult cs = c_step(data, c.params, cfg.h, cfg.final_flipflop_iters);
        if (cs.objective > prev_obj + 1e-9 * std::max(1.0, std::abs(prev_obj)))
          ++g_cstep_violations;
        bool same = (cs.subset == c.subset);
        c.subset = std::move(cs.subset);
        c.params = std::move(cs.params);
        c.objective = cs.objective;
        prev_obj = cs.objective;
        if (same) {
          settled = true;
          break;
        }
      }
      if (!settled) ++g_cstep_nonterminations;
    } catch (const NumericalError&) {
      c.valid = false;
    }
  }

  int best_idx = -1;
  for (int s : keep) {
    const Candidate& c = cand[static_cast<std::size_t>(s)];
    if (!c.valid) continue;
    if (best_idx < 0 || c.objective < cand[static_cast<std::size_t>(best_idx)].objective)
      best_idx = s;
  }
  if (best_idx < 0)
    throw EstimationError("raw_mmcd: all kept candidates failed during concentration");
  best = cand[static_cast<std::size_t>(best_idx)];

  MmcdFit fit;
  fit.config_echo = cfg;
  fit.subset = best.subset;
  fit.raw_objective = best.objective;
  fit.raw_params = best.params;

  // Consistency rescale so raw distances are chi-square calibrated.
  const double alpha = static_cast<double>(cfg.h) / n;
  fit.raw_params.sigma_c *= consistency_factor(alpha, d_c * d_r);
  normalize_trace(fit.raw_params);
  return fit;
}

void reweight_mmcd(const MatrixDataset& data, MmcdFit& fit, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw ArgumentError("reweight_mmcd: alpha must lie in (0, 1]");
  const int n = data.n();
  const int d_c = data.d_c;
  const int d_r = data.d_r;

  const double cutoff = alpha < 1.0
                            ? chi2_quantile(static_cast<double>(d_c) * d_r, alpha)
                            : std::numeric_limits<double>::infinity();

  CovFactors f = factorize(fit.raw_params);
  std::vector<double> d2 = mmd2_batch(data, fit.raw_params, f);

  fit.weights.assign(static_cast<std::size_t>(n), 0);
  std::vector<double> w(static_cast<std::size_t>(n), 0.0);
  int kept = 0;
  for (int i = 0; i < n; ++i) {
    if (d2[static_cast<std::size_t>(i)] <= cutoff) {
      fit.weights[static_cast<std::size_t>(i)] = 1;
      w[static_cast<std::size_t>(i)] = 1.0;
      ++kept;
    }
  }
  if (kept < min_effective_count(d_c, d_r))
    throw EstimationError("reweight_mmcd: only " + std::to_string(kept) +
                          " observations kept by the cutoff");

  FlipflopResult refit = flipflop_fit(data, &w, nullptr, 1e-8, 1000);
  fit.reweighted_params = refit.params;
  const double alpha_eff = static_cast<double>(kept) / n;
  if (alpha_eff < 1.0) {
    if (alpha_eff <= 0.5)
      throw EstimationError("reweight_mmcd: fewer than half the observations kept");
    fit.reweighted_params.sigma_c *= consistency_factor(alpha_eff, d_c * d_r);
    normalize_trace(fit.reweighted_params);
  }

  CovFactors f2 = factorize(fit.reweighted_params);
  fit.distances = mmd2_batch(data, fit.reweighted_params, f2);
}

}  // namespace matpca
