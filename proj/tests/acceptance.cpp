// Acceptance suite. Each check prints exactly one line
//
//   ACCEPTANCE <k> PASS: <measured detail>
//   ACCEPTANCE <k> FAIL: <measured detail>
//
// and the process exit code is the number of failed checks. The checks are
// split into groups so the harness can keep the slow Monte-Carlo sweeps in
// their own budget:
//
//   --group core    fast numerical checks        (1, 2, 3, 5, 10, 11, 12)
//   --group bench   contamination sweeps         (6, 7, then 4)
//   --group data2   detection / labeling pattern (8, 9)
//   --group cli     binary-level determinism     (13), needs --cli PATH
//   --group all     everything (default)
//
// --scratch DIR is where the cli group writes its artifacts.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "matpca/benchmark.hpp"
#include "matpca/datagen.hpp"
#include "matpca/dataset.hpp"
#include "matpca/errors.hpp"
#include "matpca/hrfpca.hpp"
#include "matpca/matnorm.hpp"
#include "matpca/mmcd.hpp"
#include "matpca/rng.hpp"
#include "matpca/robust_stats.hpp"
#include "oracles.hpp"

namespace {

using namespace matpca;

int g_failures = 0;

// Elemental starts used by the sweep groups. The library default of 500 is
// sized for one-off fits; at 50 reps x 8 cells it would blow far past the
// harness timeout without changing any of the measured patterns.
constexpr int kSweepStarts = 100;
constexpr int kSweepReps = 50;

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::string num(double v) {
  char b[64];
  std::snprintf(b, sizeof(b), "%.4g", v);
  return std::string(b);
}

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("ACCEPTANCE %d %s: %s\n", criterion, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void note(const std::string& text) {
  std::printf("  note: %s\n", text.c_str());
  std::fflush(stdout);
}

void progress(const std::string& text) {
  std::fprintf(stderr, "[acceptance] %s\n", text.c_str());
  std::fflush(stderr);
}

// ---------------------------------------------------------------------------
// 1. mmd2 / matnorm_logpdf against the dense vectorized oracle.

void criterion1() {
  Timer timer;
  const int shapes[8][2] = {{1, 1}, {2, 3}, {3, 2}, {4, 4},
                            {2, 8}, {6, 6}, {1, 12}, {5, 7}};
  double worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d_c = shapes[i % 8][0];
    const int d_r = shapes[i % 8][1];
    MatNormalParams p = oracle::random_params(d_c, d_r, 40001, static_cast<std::uint64_t>(i));
    Eigen::MatrixXd X =
        p.M + oracle::random_matrix(d_c, d_r, 40002, static_cast<std::uint64_t>(i));
    worst = std::max(worst, std::abs(mmd2(X, p) - oracle::dense_mmd2(X, p)));
    worst = std::max(worst,
                     std::abs(matnorm_logpdf(X, p) - oracle::dense_logpdf(X, p)));
  }
  const double secs = timer.secs();
  const bool pass = worst < 1e-10 && secs < 5.0;
  report(1, pass,
         "dense-oracle max |diff| " + num(worst) +
             " over 200 instances (limit 1e-10) in " + num(secs) + " s (limit 5)");
}

// ---------------------------------------------------------------------------
// 2. Flip-flop: monotone likelihood, fixed point, d_r = 1 degeneracy.

void criterion2() {
  const int shapes[8][2] = {{2, 3}, {3, 2}, {4, 4}, {2, 5},
                            {5, 3}, {3, 4}, {6, 2}, {4, 5}};
  int monotone_bad = 0;
  double worst_resid = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d_c = shapes[i % 8][0];
    const int d_r = shapes[i % 8][1];
    const int n = 30 + 10 * (i % 4);
    MatNormalParams truth =
        oracle::random_params(d_c, d_r, 50001, static_cast<std::uint64_t>(i));
    MatrixDataset data =
        oracle::random_dataset(n, truth, 50100 + static_cast<std::uint64_t>(i));

    // The likelihood-ratio stop can trigger while the estimate is still
    // sliding along a near-flat direction; drive the iteration to numerical
    // convergence so the residual measures the fixed point itself.
    FlipflopResult fit = flipflop_fit(data, nullptr, nullptr, 1e-15, 4000);
    for (std::size_t t = 1; t < fit.objective_trace.size(); ++t) {
      const double prev = fit.objective_trace[t - 1];
      if (fit.objective_trace[t] < prev - 1e-9 * std::abs(prev)) ++monotone_bad;
    }

    FlipflopResult again = flipflop_fit(data, nullptr, &fit.params, 1e-16, 1);
    const double resid =
        std::max((again.params.sigma_c - fit.params.sigma_c).norm(),
                 (again.params.sigma_r - fit.params.sigma_r).norm());
    worst_resid = std::max(worst_resid, resid);
  }

  double worst_vec = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int d_c = 3 + 2 * (i % 3);
    const int n = 60;
    MatNormalParams truth =
        oracle::random_params(d_c, 1, 50201, static_cast<std::uint64_t>(i));
    MatrixDataset data =
        oracle::random_dataset(n, truth, 50300 + static_cast<std::uint64_t>(i));
    FlipflopResult fit = flipflop_fit(data, nullptr, nullptr, 1e-14, 2000);

    Eigen::VectorXd mean = Eigen::VectorXd::Zero(d_c);
    for (const Eigen::MatrixXd& s : data.samples) mean += s.col(0);
    mean /= n;
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d_c, d_c);
    for (const Eigen::MatrixXd& s : data.samples) {
      Eigen::VectorXd d = s.col(0) - mean;
      S += d * d.transpose();
    }
    S /= n;
    const double rel = (kron_covariance(fit.params) - S).norm() / S.norm();
    worst_vec = std::max(worst_vec, rel);
    worst_vec = std::max(worst_vec, (fit.params.M.col(0) - mean).norm());
  }

  const bool pass = monotone_bad == 0 && worst_resid < 1e-6 && worst_vec < 1e-8;
  report(2, pass,
         "100 fits: " + std::to_string(monotone_bad) +
             " likelihood decreases; fixed-point residual max " + num(worst_resid) +
             " (limit 1e-6); d_r=1 vs direct ML rel error max " + num(worst_vec) +
             " (limit 1e-8)");
}

// ---------------------------------------------------------------------------
// 3. raw_mmcd against the exhaustive subset minimum (n <= 12, 2x2, h = n-2).

void criterion3() {
  progress("criterion 3: exhaustive subset oracle (50 instances)");
  Timer timer;
  int mismatches = 0;
  double worst_gap = 0.0;
  std::string first_bad;
  for (int i = 0; i < 50; ++i) {
    const int n = 8 + (i % 5);
    const int h = n - 2;
    MatNormalParams truth =
        oracle::random_params(2, 2, 60001, static_cast<std::uint64_t>(i));
    MatrixDataset data =
        oracle::random_dataset(n, truth, 60100 + static_cast<std::uint64_t>(i));
    data.samples[1].array() += 35.0;
    data.samples[static_cast<std::size_t>(n - 2)].array() -= 42.0;

    MmcdConfig cfg;
    cfg.h = h;
    cfg.n_starts = 200;
    cfg.seed = 97 + static_cast<std::uint64_t>(13 * i);
    MmcdFit fit = raw_mmcd(data, cfg);

    double best_obj = std::numeric_limits<double>::infinity();
    std::vector<int> best_subset;
    oracle::for_each_combination(n, h, [&](const std::vector<int>& subset) {
      std::vector<double> w(static_cast<std::size_t>(n), 0.0);
      for (int j : subset) w[static_cast<std::size_t>(j)] = 1.0;
      FlipflopResult r = flipflop_fit(data, &w, nullptr, 1e-12, 500);
      const double obj = mmcd_objective(r.params);
      if (obj < best_obj) {
        best_obj = obj;
        best_subset = subset;
      }
    });

    const double gap = std::abs(fit.raw_objective - best_obj) /
                       std::max(1.0, std::abs(best_obj));
    worst_gap = std::max(worst_gap, gap);
    if (fit.subset != best_subset && gap > 1e-6) {
      ++mismatches;
      if (first_bad.empty())
        first_bad = " (first: instance " + std::to_string(i) + " obj " +
                    num(fit.raw_objective) + " vs " + num(best_obj) + ")";
    }
  }
  const double secs = timer.secs();
  const bool pass = mismatches == 0 && secs < 60.0;
  report(3, pass,
         "50 instances: " + std::to_string(mismatches) +
             " exhaustive-minimum mismatches, worst objective gap " + num(worst_gap) +
             first_bad + ", " + num(secs) + " s (limit 60)");
}

// ---------------------------------------------------------------------------
// 5. Subset invariance under nonsingular affine transforms X -> A X B + C.

void criterion5() {
  progress("criterion 5: affine invariance of the subset (20 transforms)");
  const int n = 60;
  MatNormalParams truth = oracle::random_params(3, 4, 70001, 0);
  MatrixDataset data = oracle::random_dataset(n, truth, 70002);
  for (int k = 0; k < 8; ++k) {
    const int idx = 3 + 7 * k;
    data.samples[static_cast<std::size_t>(idx)].array() += (k % 2 == 0) ? 40.0 : -40.0;
  }

  MmcdConfig cfg;
  cfg.n_starts = 80;
  cfg.seed = 424242;
  MmcdFit base = raw_mmcd(data, cfg);

  int identical = 0;
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXd A, B;
    for (std::uint64_t bump = 0;; ++bump) {
      A = Eigen::MatrixXd::Identity(3, 3) +
          0.35 * oracle::random_matrix(3, 3, 70100, 101 * static_cast<std::uint64_t>(t) + bump);
      if (std::abs(A.determinant()) > 1e-3) break;
    }
    for (std::uint64_t bump = 0;; ++bump) {
      B = Eigen::MatrixXd::Identity(4, 4) +
          0.35 * oracle::random_matrix(4, 4, 70200, 101 * static_cast<std::uint64_t>(t) + bump);
      if (std::abs(B.determinant()) > 1e-3) break;
    }
    Eigen::MatrixXd C = 3.0 * oracle::random_matrix(3, 4, 70300, static_cast<std::uint64_t>(t));

    MatrixDataset moved = data;
    for (Eigen::MatrixXd& s : moved.samples) s = A * s * B + C;
    MmcdFit fit = raw_mmcd(moved, cfg);
    if (fit.subset == base.subset) ++identical;
  }

  const bool pass = identical == 20;
  report(5, pass,
         std::to_string(identical) +
             "/20 transformed runs reproduce the base subset (|H| = " +
             std::to_string(base.subset.size()) + ") at fixed seed");
}

// ---------------------------------------------------------------------------
// 10. Shapley entry-sum identity and the diagonal closed form.

void criterion10() {
  const int shapes[8][2] = {{1, 1}, {2, 3}, {3, 2}, {4, 4},
                            {2, 8}, {6, 6}, {1, 12}, {5, 7}};
  double worst_sum = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int d_c = shapes[i % 8][0];
    const int d_r = shapes[i % 8][1];
    MatNormalParams p =
        oracle::random_params(d_c, d_r, 80001, static_cast<std::uint64_t>(i));
    Eigen::MatrixXd X =
        p.M + oracle::random_matrix(d_c, d_r, 80002, static_cast<std::uint64_t>(i));
    worst_sum = std::max(worst_sum, std::abs(shapley_cellwise(X, p).sum() - mmd2(X, p)));
  }

  const int diag_shapes[4][2] = {{2, 3}, {4, 4}, {3, 5}, {6, 2}};
  double worst_diag = 0.0;
  for (int i = 0; i < 200; ++i) {
    const int d_c = diag_shapes[i % 4][0];
    const int d_r = diag_shapes[i % 4][1];
    KeyedRng rng(80003, 77, static_cast<std::uint64_t>(i));
    MatNormalParams p;
    p.M = oracle::random_matrix(d_c, d_r, 80004, static_cast<std::uint64_t>(i));
    Eigen::VectorXd a(d_c), b(d_r);
    for (int r = 0; r < d_c; ++r) a(r) = rng.uniform(0.5, 3.0);
    for (int c = 0; c < d_r; ++c) b(c) = rng.uniform(0.5, 3.0);
    p.sigma_c = a.asDiagonal();
    p.sigma_r = b.asDiagonal();
    Eigen::MatrixXd X =
        p.M + oracle::random_matrix(d_c, d_r, 80005, static_cast<std::uint64_t>(i));
    Eigen::MatrixXd phi = shapley_cellwise(X, p);
    for (int r = 0; r < d_c; ++r)
      for (int c = 0; c < d_r; ++c) {
        const double want = (X(r, c) - p.M(r, c)) * (X(r, c) - p.M(r, c)) / (a(r) * b(c));
        worst_diag = std::max(worst_diag, std::abs(phi(r, c) - want));
      }
  }

  const bool pass = worst_sum < 1e-10 && worst_diag < 1e-12;
  report(10, pass,
         "entry-sum vs mmd2 max |diff| " + num(worst_sum) +
             " over 1000 instances (limit 1e-10); diagonal closed form max |diff| " +
             num(worst_diag) + " over 200 (limit 1e-12)");
}

// ---------------------------------------------------------------------------
// 11. Univariate MCD vs brute force; quantile round trips.

void criterion11() {
  progress("criterion 11: univariate MCD brute force (500 trials)");
  int bad_var = 0, bad_scale = 0;
  for (int t = 0; t < 500; ++t) {
    const int n = 2 + (t % 14);
    KeyedRng rng(110001, 5, static_cast<std::uint64_t>(t));
    const int h_min = default_univariate_h(n);
    const int h = h_min + static_cast<int>(rng.next_u64() %
                                           static_cast<std::uint64_t>(n - h_min + 1));
    std::vector<double> values(static_cast<std::size_t>(n));
    for (double& v : values) v = 2.0 * rng.normal();
    if (t % 4 == 1) values[0] += 25.0;  // a gross point the window must dodge
    if (t % 3 == 0)
      for (double& v : values) v = std::round(2.0 * v) / 2.0;  // forced ties

    UnivariateMcdResult got = univariate_mcd(values, h);

    auto subset_var = [&](const std::vector<int>& idx) {
      double mean = 0.0;
      for (int i : idx) mean += values[static_cast<std::size_t>(i)];
      mean /= static_cast<double>(idx.size());
      double ss = 0.0;
      for (int i : idx) {
        const double d = values[static_cast<std::size_t>(i)] - mean;
        ss += d * d;
      }
      return ss / static_cast<double>(idx.size() - 1);
    };

    double best = std::numeric_limits<double>::infinity();
    oracle::for_each_combination(n, h, [&](const std::vector<int>& subset) {
      best = std::min(best, subset_var(subset));
    });

    const double achieved = subset_var(got.subset);
    if (achieved > best + 1e-9 * std::max(1.0, best)) ++bad_var;
    const double want_scale =
        std::sqrt(achieved) * consistency_factor(static_cast<double>(h) / n, 1);
    if (std::abs(got.estimate.scale - want_scale) >
        1e-10 * std::max(1.0, want_scale))
      ++bad_scale;
  }

  const double dfs[8] = {1, 2, 3, 5, 10, 40, 80, 200};
  const double ps[9] = {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.975, 0.999};
  double worst_rt = 0.0;
  for (double df : dfs)
    for (double p : ps)
      worst_rt = std::max(worst_rt, std::abs(chi2_cdf(chi2_quantile(df, p), df) - p));
  for (double p : ps)
    worst_rt = std::max(worst_rt, std::abs(std_normal_cdf(std_normal_quantile(p)) - p));

  const bool pass = bad_var == 0 && bad_scale == 0 && worst_rt < 1e-8;
  report(11, pass,
         "500 trials (n <= 15): " + std::to_string(bad_var) +
             " above the brute-force minimum variance, " + std::to_string(bad_scale) +
             " scale mismatches; quantile/CDF round-trip max |diff| " + num(worst_rt) +
             " (limit 1e-8)");
}

// ---------------------------------------------------------------------------
// 12. Calibration on clean data2: few flags, mostly regular labels.

void criterion12() {
  progress("criterion 12: calibration on a clean sample");
  PopulationSpec pop = build_population("data2", 20260814);
  MatrixDataset data = sample_matrix_normal(pop);

  MmcdConfig cfg;
  cfg.n_starts = 150;
  cfg.seed = 2029;
  HrfpcaModel model = fit_model(data, pop.q_c, pop.q_r, Method::kHrfpca, cfg);

  DetectionReport det = detect_outliers(model.params, data, 0.975);
  int flagged = 0;
  for (int f : det.flags) flagged += f;
  const double flag_rate = static_cast<double>(flagged) / data.n();

  SodaReport soda = classify_soda(model, data);
  int regular = 0;
  for (SodaLabel l : soda.labels)
    if (l == SodaLabel::kRegular) ++regular;
  const double regular_rate = static_cast<double>(regular) / data.n();

  const bool pass = flag_rate <= 0.08 && regular_rate >= 0.90;
  report(12, pass,
         "clean data2: flagged " + std::to_string(flagged) + "/" +
             std::to_string(data.n()) + " = " + num(100.0 * flag_rate) +
             "% (limit 8%); regular labels " + std::to_string(regular) + "/" +
             std::to_string(data.n()) + " = " + num(100.0 * regular_rate) +
             "% (floor 90%)");
}

// ---------------------------------------------------------------------------
// bench group: criteria 6 and 7 (sweeps), then 4 (counters over both).

const BenchCellResult* find_cell(const std::vector<BenchCellResult>& cells,
                                 Situation sit, double p, Method m) {
  for (const BenchCellResult& c : cells)
    if (c.sit == sit && c.p == p && c.method == m) return &c;
  return nullptr;
}

void bench_group() {
  reset_cstep_violation_count();
  reset_cstep_nontermination_count();

  // Criterion 6: contamination sweep on data1.
  progress("criterion 6: data1 sweep (2 sits x 4 props x 50 reps x 2 methods)");
  Timer t6;
  BenchOptions opt;
  opt.population = "data1";
  opt.kinds = {OutlierKind::kPc};
  opt.sits = {Situation::kSitI, Situation::kSitIII};
  opt.props = {0.1, 0.3, 0.4, 0.49};
  opt.reps = kSweepReps;
  opt.methods = {Method::kHrfpca, Method::kFpca};
  opt.seed = 20260814ULL;
  opt.mmcd.n_starts = kSweepStarts;
  std::vector<BenchCellResult> cells = run_benchmark(opt);

  double hr_max = -std::numeric_limits<double>::infinity();
  double fp_min = std::numeric_limits<double>::infinity();
  std::string bad;
  for (Situation sit : opt.sits) {
    for (double p : opt.props) {
      const BenchCellResult* hr = find_cell(cells, sit, p, Method::kHrfpca);
      const BenchCellResult* fp = find_cell(cells, sit, p, Method::kFpca);
      const double hm = hr->mean_reldiff();
      const double fm = fp->mean_reldiff();
      hr_max = std::max(hr_max, hm);
      fp_min = std::min(fp_min, fm);
      const bool ok = hm < 1.0 && fm > 10.0 && hm < fm;
      if (!ok && bad.empty()) {
        bad = std::string(" (first bad cell ") + situation_name(sit) + " p=" + num(p) +
              ": hrfpca " + num(hm) + ", fpca " + num(fm);
        if (!hr->note.empty()) bad += "; note: " + hr->note;
        if (!fp->note.empty()) bad += "; note: " + fp->note;
        bad += ")";
      }
    }
  }
  report(6, bad.empty(),
         "8 cells (sit1/sit3 x p in {0.1,0.3,0.4,0.49}, " + std::to_string(kSweepReps) +
             " reps): hrfpca mean reldiff max " + num(hr_max) +
             " (limit 1.0); fpca min " + num(fp_min) +
             " (floor 10); hrfpca < fpca in every cell" + bad + "; " + num(t6.secs()) +
             " s");

  // Criterion 7: breakdown boundary at p = 0.50. At half contamination the
  // h-subset must absorb spikes and the reweighting step refuses outright
  // (it would keep <= n/2 observations, outside the consistency-factor
  // domain), so the boundary is shown on the raw estimates, which exist on
  // both sides of it.
  progress("criterion 7: breakdown boundary sweep (p in {0.49, 0.50}, 50 reps each)");
  Timer t7;
  BenchOptions opt7 = opt;
  opt7.sits = {Situation::kSitIII};
  opt7.props = {0.49, 0.5};
  opt7.methods = {Method::kHrfpca};
  opt7.use_raw = true;
  std::vector<BenchCellResult> cells7 = run_benchmark(opt7);

  BenchOptions opt7rw = opt7;
  opt7rw.props = {0.5};
  opt7rw.use_raw = false;
  std::vector<BenchCellResult> cells7rw = run_benchmark(opt7rw);

  auto stats = [](const BenchCellResult& cell) {
    int exceed = 0, failed = 0;
    std::vector<double> finite;
    for (double r : cell.reldiff) {
      if (std::isnan(r)) {
        ++failed;
        continue;
      }
      finite.push_back(r);
      if (r > 1.0) ++exceed;
    }
    std::sort(finite.begin(), finite.end());
    const double median = finite.empty()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : finite[finite.size() / 2];
    return std::make_tuple(exceed, failed, median);
  };
  const auto [exceed_at, failed_at, median_at] =
      stats(*find_cell(cells7, Situation::kSitIII, 0.5, Method::kHrfpca));
  const auto [exceed_below, failed_below, median_below] =
      stats(*find_cell(cells7, Situation::kSitIII, 0.49, Method::kHrfpca));
  const auto [rw_exceed, rw_failed, rw_median] = stats(cells7rw.front());
  (void)rw_exceed;
  (void)rw_median;
  (void)failed_below;

  const std::pair<long, long> mb = max_breakdown(1000, 4, 10);
  const bool mb_ok = mb.first == 499 && mb.second == 1000 &&
                     static_cast<double>(mb.first) / static_cast<double>(mb.second) == 0.499;
  const bool majority = exceed_at > kSweepReps / 2;
  report(7, majority && mb_ok,
         "raw estimates, sit3: reldiff > 1.0 in " + std::to_string(exceed_at) + "/" +
             std::to_string(kSweepReps) + " reps at p=0.50 (median " + num(median_at) +
             ", " + std::to_string(failed_at) + " failures) vs " +
             std::to_string(exceed_below) + "/" + std::to_string(kSweepReps) +
             " at p=0.49 (median " + num(median_below) +
             "); reweighting at p=0.50 refuses in " + std::to_string(rw_failed) + "/" +
             std::to_string(kSweepReps) +
             " reps (kept <= n/2); max_breakdown(1000,4,10) = " +
             std::to_string(mb.first) + "/" + std::to_string(mb.second) +
             " = 0.499 exactly; " + num(t7.secs()) + " s");

  // Criterion 4: the runtime monotonicity/termination assertions stayed quiet
  // over every concentration chain run by the sweeps above.
  const long long viol = cstep_violation_count();
  const long long nonterm = cstep_nontermination_count();
  const int searches = 8 * kSweepReps + 3 * kSweepReps;
  report(4, viol == 0 && nonterm == 0,
         std::to_string(viol) + " objective increases above 1e-9 relative and " +
             std::to_string(nonterm) + " unterminated concentration chains across " +
             std::to_string(searches) + " subset searches");
}

// ---------------------------------------------------------------------------
// data2 group: criteria 8 and 9 on mixed-contaminated data2 samples.

void data2_group() {
  const std::uint64_t seeds[5] = {11, 22, 33, 44, 55};

  // Pooled tallies for criterion 8.
  int rob_tp = 0, rob_fp = 0, out_total = 0, clean_total = 0;
  int ff_tp = 0;

  // Pooled tallies for criterion 9.
  int pc_good = 0, pc_total = 0;
  int oc_orth = 0, oc_total = 0;
  int po_bad = 0, po_total = 0;
  int plain_correct = 0, plain_total = 0;
  int pc_good43 = 0, oc_orth43 = 0, po_bad43 = 0;

  for (std::uint64_t seed : seeds) {
    progress("data2 group: contaminated sample, seed " + std::to_string(seed));
    PopulationSpec pop = build_population("data2", seed);
    MatrixDataset data = sample_matrix_normal(pop);
    MixedContamination mix =
        contaminate_mixed(data, pop, 0.2, 100.0, 110.0, seed * 1000 + 7);

    std::vector<char> is_out(static_cast<std::size_t>(data.n()), 0);
    for (int i : mix.pc) is_out[static_cast<std::size_t>(i)] = 1;
    for (int i : mix.oc) is_out[static_cast<std::size_t>(i)] = 1;
    for (int i : mix.pc_oc) is_out[static_cast<std::size_t>(i)] = 1;

    MmcdConfig cfg;
    cfg.n_starts = 150;
    cfg.seed = seed * 77 + 5;
    HrfpcaModel robust = fit_model(data, pop.q_c, pop.q_r, Method::kHrfpca, cfg);
    HrfpcaModel plain = fit_model(data, pop.q_c, pop.q_r, Method::kFpca, cfg);

    DetectionReport det_rob = detect_outliers(robust.params, data, 0.975);
    DetectionReport det_ff = detect_outliers(plain.params, data, 0.975);
    for (int i = 0; i < data.n(); ++i) {
      if (is_out[static_cast<std::size_t>(i)]) {
        ++out_total;
        rob_tp += det_rob.flags[static_cast<std::size_t>(i)];
        ff_tp += det_ff.flags[static_cast<std::size_t>(i)];
      } else {
        ++clean_total;
        rob_fp += det_rob.flags[static_cast<std::size_t>(i)];
      }
    }

    SodaReport soda_rob = classify_soda(robust, data);
    SodaReport soda_plain = classify_soda(plain, data);
    auto tally = [](const SodaReport& r, const std::vector<int>& idx, SodaLabel want) {
      int hit = 0;
      for (int i : idx)
        if (r.labels[static_cast<std::size_t>(i)] == want) ++hit;
      return hit;
    };
    pc_total += static_cast<int>(mix.pc.size());
    oc_total += static_cast<int>(mix.oc.size());
    po_total += static_cast<int>(mix.pc_oc.size());
    pc_good += tally(soda_rob, mix.pc, SodaLabel::kGoodLeverage);
    oc_orth += tally(soda_rob, mix.oc, SodaLabel::kOrthogonalOutlier);
    po_bad += tally(soda_rob, mix.pc_oc, SodaLabel::kBadLeverage);

    plain_total += static_cast<int>(mix.oc.size() + mix.pc_oc.size());
    plain_correct += tally(soda_plain, mix.oc, SodaLabel::kOrthogonalOutlier);
    plain_correct += tally(soda_plain, mix.pc_oc, SodaLabel::kBadLeverage);

    // Informational: the same robust estimates read at one extra rank in each
    // direction, where the spike directions are absorbed into the subspace.
    HrfpcaModel wide = robust;
    wide.q_c = pop.q_c + 1;
    wide.q_r = pop.q_r + 1;
    wide.pcs = eigendecompose_params(robust.params, wide.q_c, wide.q_r);
    SodaReport soda_wide = classify_soda(wide, data);
    pc_good43 += tally(soda_wide, mix.pc, SodaLabel::kGoodLeverage);
    oc_orth43 += tally(soda_wide, mix.oc, SodaLabel::kOrthogonalOutlier);
    po_bad43 += tally(soda_wide, mix.pc_oc, SodaLabel::kBadLeverage);
  }

  const double fp_rate = static_cast<double>(rob_fp) / clean_total;
  const bool pass8 = rob_tp == out_total && fp_rate <= 0.10 && ff_tp < out_total;
  report(8, pass8,
         "pooled over 5 samples: robust detection " + std::to_string(rob_tp) + "/" +
             std::to_string(out_total) + " outliers flagged, false positives " +
             std::to_string(rob_fp) + "/" + std::to_string(clean_total) + " = " +
             num(100.0 * fp_rate) + "% (limit 10%); plain flip-flop flags " +
             std::to_string(ff_tp) + "/" + std::to_string(out_total) +
             " (must be < all)");

  const double pc_rate = static_cast<double>(pc_good) / pc_total;
  const double oc_rate = static_cast<double>(oc_orth) / oc_total;
  const double po_rate = static_cast<double>(po_bad) / po_total;
  const double plain_rate = static_cast<double>(plain_correct) / plain_total;
  const bool pass9 =
      pc_rate >= 0.95 && oc_rate >= 0.95 && po_rate >= 0.95 && plain_rate <= 0.50;
  report(9, pass9,
         "robust model at generating ranks: PC->good_leverage " +
             std::to_string(pc_good) + "/" + std::to_string(pc_total) +
             ", OC->orthogonal_outlier " + std::to_string(oc_orth) + "/" +
             std::to_string(oc_total) + ", PC_OC->bad_leverage " +
             std::to_string(po_bad) + "/" + std::to_string(po_total) +
             " (each needs >= 95%); plain model correct on OC and PC_OC " +
             std::to_string(plain_correct) + "/" + std::to_string(plain_total) +
             " = " + num(plain_rate) + " (limit 0.50)");
  note("robust model read at ranks (4,3): PC->good_leverage " +
       std::to_string(pc_good43) + "/" + std::to_string(pc_total) +
       ", OC->orthogonal_outlier " + std::to_string(oc_orth43) + "/" +
       std::to_string(oc_total) + ", PC_OC->bad_leverage " +
       std::to_string(po_bad43) + "/" + std::to_string(po_total));
}

// ---------------------------------------------------------------------------
// 13. Byte determinism of the command-line tool across runs and threads.

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return in ? buf.str() : std::string("<unreadable:" + path + ">");
}

void criterion13(const std::string& scratch, const std::string& cli) {
  if (cli.empty()) {
    report(13, false, "no --cli path given; cannot drive the binary");
    return;
  }
  progress("criterion 13: binary-level determinism");
  std::filesystem::create_directories(scratch);
  const std::string log = scratch + "/cli.log";
  const std::string ds = scratch + "/accept_ds.matds";

  auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " >> " + log + " 2>&1";
    return std::system(cmd.c_str()) == 0;
  };

  bool ran = run("--threads 1 simulate --population data2 --contaminate mixed "
                 "--sit 3 --prop 0.2 --seed 5 --out " + ds);

  const std::string fit_flags =
      " fit --data " + ds + " --qc 3 --qr 2 --method hrfpca --starts 40 --seed 11 --out ";
  ran = ran && run("--threads 1" + fit_flags + scratch + "/m1.matmodel");
  ran = ran && run("--threads 1" + fit_flags + scratch + "/m2.matmodel");
  ran = ran && run("--threads 4" + fit_flags + scratch + "/m3.matmodel");

  const std::string bench_flags =
      " bench --population data2 --kinds PC --sits 3 --props 0.1 --reps 2 "
      "--methods hrfpca,fpca --starts 25 --seed 3 --out ";
  ran = ran && run("--threads 1" + bench_flags + scratch + "/b1.csv");
  ran = ran && run("--threads 1" + bench_flags + scratch + "/b2.csv");
  ran = ran && run("--threads 4" + bench_flags + scratch + "/b3.csv");

  if (!ran) {
    report(13, false, "a command exited nonzero; see " + log);
    return;
  }

  const std::string m1 = read_file(scratch + "/m1.matmodel");
  const std::string m2 = read_file(scratch + "/m2.matmodel");
  const std::string m3 = read_file(scratch + "/m3.matmodel");
  const std::string b1 = read_file(scratch + "/b1.csv");
  const std::string b2 = read_file(scratch + "/b2.csv");
  const std::string b3 = read_file(scratch + "/b3.csv");

  const bool fit_ok = !m1.empty() && m1 == m2 && m1 == m3;
  const bool bench_ok = !b1.empty() && b1 == b2 && b1 == b3;
  report(13, fit_ok && bench_ok,
         std::string("model files ") + (fit_ok ? "byte-identical" : "DIFFER") +
             " across two runs and --threads {1,4} (" + std::to_string(m1.size()) +
             " bytes); bench CSVs " + (bench_ok ? "byte-identical" : "DIFFER") +
             " (" + std::to_string(b1.size()) + " bytes)");
}

}  // namespace

int main(int argc, char** argv) {
  std::string group = "all";
  std::string scratch = "acceptance_scratch";
  std::string cli;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    auto next = [&]() -> std::string {
      if (i + 1 >= argc) {
        std::fprintf(stderr, "missing value for %s\n", arg.c_str());
        std::exit(64);
      }
      return argv[++i];
    };
    if (arg == "--group") group = next();
    else if (arg == "--scratch") scratch = next();
    else if (arg == "--cli") cli = next();
    else {
      std::fprintf(stderr,
                   "usage: acceptance [--group core|bench|data2|cli|all] "
                   "[--scratch DIR] [--cli PATH]\n");
      return 64;
    }
  }

  try {
    if (group == "core" || group == "all") {
      criterion1();
      criterion2();
      criterion3();
      criterion5();
      criterion10();
      criterion11();
      criterion12();
    }
    if (group == "bench" || group == "all") bench_group();
    if (group == "data2" || group == "all") data2_group();
    if (group == "cli" || group == "all") criterion13(scratch, cli);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance: unhandled error: %s\n", e.what());
    return 99;
  }

  if (g_failures > 0)
    std::fprintf(stderr, "acceptance: %d check(s) failed\n", g_failures);
  return g_failures;
}
