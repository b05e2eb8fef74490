#include "matpca/benchmark.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>

#include "matpca/io.hpp"
#include "matpca/kernels.hpp"
#include "matpca/rng.hpp"

namespace matpca {

namespace {

const double kNan = std::numeric_limits<double>::quiet_NaN();

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return kNan;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

void push_bytes(std::vector<unsigned char>& buf, const void* p, std::size_t len) {
  const unsigned char* b = static_cast<const unsigned char*>(p);
  buf.insert(buf.end(), b, b + len);
}

// Leave-one-out 1-NN over whitened score matrices against the outlier
// indicator; returns the misclassification rate.
double knn_outlier_error(const HrfpcaModel& model, const MatrixDataset& data,
                         const std::vector<int>& outliers) {
  const int n = data.n();
  std::vector<char> is_out(static_cast<std::size_t>(n), 0);
  for (int i : outliers) is_out[static_cast<std::size_t>(i)] = 1;

  std::vector<Eigen::MatrixXd> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[static_cast<std::size_t>(i)] =
        whitened_scores(model, data.samples[static_cast<std::size_t>(i)]);

  int wrong = 0;
  for (int i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::infinity();
    int best_j = -1;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      double d = (z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)])
                     .squaredNorm();
      if (d < best) {
        best = d;
        best_j = j;
      }
    }
    if (best_j >= 0 &&
        is_out[static_cast<std::size_t>(best_j)] != is_out[static_cast<std::size_t>(i)])
      ++wrong;
  }
  return static_cast<double>(wrong) / n;
}

}  // namespace

double BenchCellResult::mean_reldiff() const { return mean_of(reldiff); }
double BenchCellResult::sd_reldiff() const { return sd_of(reldiff); }

std::uint64_t bench_rep_seed(std::uint64_t master, OutlierKind kind, Situation sit,
                             double p, int rep) {
  std::vector<unsigned char> buf;
  push_bytes(buf, &master, sizeof(master));
  const char* kn = outlier_kind_name(kind);
  push_bytes(buf, kn, std::strlen(kn) + 1);
  const char* sn = situation_name(sit);
  push_bytes(buf, sn, std::strlen(sn) + 1);
  std::uint64_t pbits = 0;
  std::memcpy(&pbits, &p, sizeof(pbits));
  push_bytes(buf, &pbits, sizeof(pbits));
  std::int64_t r = rep;
  push_bytes(buf, &r, sizeof(r));
  return hash64_bytes(buf.data(), buf.size());
}

std::vector<BenchCellResult> run_benchmark(const BenchOptions& options) {
  if (options.reps < 1) throw ArgumentError("benchmark: reps must be positive");
  if (options.kinds.empty() || options.sits.empty() || options.props.empty() ||
      options.methods.empty())
    throw ArgumentError("benchmark: empty kind/sit/proportion/method list");

  std::vector<BenchCellResult> cells;
  for (OutlierKind kind : options.kinds) {
    for (Situation sit : options.sits) {
      auto [a, b] = situation_range(sit);
      for (double p : options.props) {
        const std::size_t first = cells.size();
        for (Method method : options.methods) {
          BenchCellResult cell;
          cell.kind = kind;
          cell.sit = sit;
          cell.p = p;
          cell.method = method;
          cell.reldiff.assign(static_cast<std::size_t>(options.reps), kNan);
          if (options.knn)
            cell.knn_err.assign(static_cast<std::size_t>(options.reps), kNan);
          cells.push_back(std::move(cell));
        }
        std::vector<std::string> rep_note(
            static_cast<std::size_t>(options.reps) * options.methods.size());

#pragma omp parallel for schedule(dynamic) num_threads(effective_threads())
        for (int rep = 0; rep < options.reps; ++rep) {
          const std::uint64_t seed = bench_rep_seed(options.seed, kind, sit, p, rep);
          PopulationSpec pop;
          MatrixDataset data;
          std::vector<int> outliers;
          bool data_ok = false;
          std::string data_err;
          try {
            pop = build_population(options.population, seed);
            data = sample_matrix_normal(pop);
            ContaminationSpec cs;
            cs.kind = kind;
            cs.proportion = p;
            cs.a = a;
            cs.b = b;
            cs.seed = seed;
            outliers = contaminate(data, pop, cs);
            data_ok = true;
          } catch (const std::exception& e) {
            data_err = e.what();
          }

          for (std::size_t m = 0; m < options.methods.size(); ++m) {
            const std::size_t slot =
                static_cast<std::size_t>(rep) * options.methods.size() + m;
            if (!data_ok) {
              rep_note[slot] = data_err;
              continue;
            }
            BenchCellResult& cell = cells[first + m];
            try {
              HrfpcaModel model;
              model.q_c = pop.q_c;
              model.q_r = pop.q_r;
              model.method = options.methods[m];
              if (options.methods[m] == Method::kHrfpca) {
                MmcdConfig cfg = options.mmcd;
                cfg.seed = seed;
                MmcdFit fit = raw_mmcd(data, cfg);
                if (options.use_raw) {
                  model.params = fit.raw_params;
                } else {
                  reweight_mmcd(data, fit);
                  model.params = fit.reweighted_params;
                }
                model.mmcd = std::move(fit);
              } else {
                model.params = flipflop_fit(data).params;
              }
              cell.reldiff[static_cast<std::size_t>(rep)] =
                  relative_difference(pop.params(), model.params);
              if (options.knn) {
                model.pcs = eigendecompose_params(model.params, pop.q_c, pop.q_r);
                cell.knn_err[static_cast<std::size_t>(rep)] =
                    knn_outlier_error(model, data, outliers);
              }
            } catch (const std::exception& e) {
              rep_note[slot] = e.what();
            }
          }
        }

        for (int rep = 0; rep < options.reps; ++rep)
          for (std::size_t m = 0; m < options.methods.size(); ++m) {
            const std::string& note =
                rep_note[static_cast<std::size_t>(rep) * options.methods.size() + m];
            if (!note.empty() && cells[first + m].note.empty())
              cells[first + m].note = note;
          }
      }
    }
  }
  return cells;
}

std::string benchmark_csv(const std::vector<BenchCellResult>& cells, int reps,
                          std::uint64_t seed, bool knn) {
  std::ostringstream out;
  out << "kind,sit,p,method,mean_reldiff,sd_reldiff,reps,seed";
  if (knn) out << ",knn_err";
  out << ",note\n";
  for (const BenchCellResult& cell : cells) {
    out << outlier_kind_name(cell.kind) << ',' << situation_name(cell.sit) << ','
        << format_double(cell.p) << ',' << method_name(cell.method) << ','
        << format_double(cell.mean_reldiff()) << ','
        << format_double(cell.sd_reldiff()) << ',' << reps << ',' << seed;
    if (knn) out << ',' << format_double(mean_of(cell.knn_err));
    out << ',' << csv_field(cell.note) << '\n';
  }
  return out.str();
}

}  // namespace matpca
