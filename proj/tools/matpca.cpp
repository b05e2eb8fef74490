// matpca: command-line surface for robust factored PCA on matrix-valued
// data. Subcommands: simulate, fit, detect, soda, shapley, scree, bench.

#include <cstdio>
#include <exception>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "matpca/benchmark.hpp"
#include "matpca/datagen.hpp"
#include "matpca/errors.hpp"
#include "matpca/hrfpca.hpp"
#include "matpca/io.hpp"
#include "matpca/kernels.hpp"
#include "matpca/matnorm.hpp"
#include "matpca/mmcd.hpp"
#include "matpca/svg.hpp"

namespace {

using namespace matpca;

Situation situation_from_token(const std::string& tok) {
  if (tok == "1" || tok == "sit1") return Situation::kSitI;
  if (tok == "2" || tok == "sit2") return Situation::kSitII;
  if (tok == "3" || tok == "sit3") return Situation::kSitIII;
  if (tok == "4" || tok == "sit4") return Situation::kSitIV;
  throw ArgumentError("--sit: unknown situation '" + tok + "' (expected 1-4)");
}

struct SimulateArgs {
  std::string population;
  std::string kind = "none";
  std::string sit = "1";
  double prop = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_simulate(const SimulateArgs& a) {
  PopulationSpec pop = build_population(a.population, a.seed);
  MatrixDataset data = sample_matrix_normal(pop);

  std::ostringstream truth;
  truth << "id,kind\n";
  if (a.kind != "none" && a.prop > 0.0) {
    auto [lo, hi] = situation_range(situation_from_token(a.sit));
    if (a.kind == "mixed") {
      MixedContamination mc = contaminate_mixed(data, pop, a.prop, lo, hi, a.seed);
      for (int i : mc.pc) truth << i << ",PC\n";
      for (int i : mc.oc) truth << i << ",OC\n";
      for (int i : mc.pc_oc) truth << i << ",PC_OC\n";
    } else {
      ContaminationSpec cs;
      cs.kind = parse_outlier_kind(a.kind);
      cs.proportion = a.prop;
      cs.a = lo;
      cs.b = hi;
      cs.seed = a.seed;
      std::vector<int> idx = contaminate(data, pop, cs);
      for (int i : idx) truth << i << ',' << outlier_kind_name(cs.kind) << '\n';
    }
  }

  write_dataset(a.out, data);
  atomic_write_text(a.out + ".truth.csv", truth.str());
  std::cout << "wrote " << a.out << " (n=" << data.n() << " shape=" << data.d_c << "x"
            << data.d_r << ") and " << a.out << ".truth.csv\n";
  return 0;
}

struct FitArgs {
  std::string data;
  int qc = 0;
  int qr = 0;
  std::string method = "hrfpca";
  int h = 0;
  int starts = 0;
  std::uint64_t seed = 0;
  std::string out;
};

int cmd_fit(const FitArgs& a) {
  MatrixDataset data = read_dataset(a.data);
  MmcdConfig cfg;
  if (a.h > 0) cfg.h = a.h;
  if (a.starts > 0) cfg.n_starts = a.starts;
  cfg.seed = a.seed;

  HrfpcaModel model = fit_model(data, a.qc, a.qr, parse_method(a.method), cfg);
  write_model(a.out, model);

  double objective;
  long h_size, kept;
  if (model.mmcd) {
    objective = model.mmcd->raw_objective;
    h_size = static_cast<long>(model.mmcd->subset.size());
    kept = 0;
    for (int w : model.mmcd->weights) kept += w;
  } else {
    objective = mmcd_objective(model.params);
    h_size = data.n();
    kept = data.n();
  }
  std::cout << "objective=" << format_double(objective) << " h=" << h_size
            << " kept=" << kept << '\n';
  return 0;
}

struct ModelDataArgs {
  std::string model;
  std::string data;
  double alpha = 0.975;
  std::string out;
};

int cmd_detect(const ModelDataArgs& a) {
  HrfpcaModel model = read_model(a.model);
  MatrixDataset data = read_dataset(a.data);
  DetectionReport report = detect_outliers(model.params, data, a.alpha);

  std::ostringstream csv;
  csv << "id,mmd2,cutoff,flag\n";
  for (int i = 0; i < data.n(); ++i)
    csv << data.ids[static_cast<std::size_t>(i)] << ','
        << format_double(report.mmd2[static_cast<std::size_t>(i)]) << ','
        << format_double(report.cutoff) << ','
        << report.flags[static_cast<std::size_t>(i)] << '\n';
  atomic_write_text(a.out, csv.str());

  long flagged = 0;
  for (int f : report.flags) flagged += f;
  std::cout << "flagged " << flagged << " of " << data.n() << " observations\n";
  return 0;
}

struct SodaArgs {
  std::string model;
  std::string data;
  std::string out_prefix;
  std::string convention = "squared";
};

int cmd_soda(const SodaArgs& a) {
  HrfpcaModel model = read_model(a.model);
  MatrixDataset data = read_dataset(a.data);
  SodaReport report = classify_soda(model, data, parse_od_convention(a.convention));

  std::ostringstream csv;
  csv << "id,sd,od,label\n";
  for (int i = 0; i < data.n(); ++i)
    csv << data.ids[static_cast<std::size_t>(i)] << ','
        << format_double(report.sd[static_cast<std::size_t>(i)]) << ','
        << format_double(report.od[static_cast<std::size_t>(i)]) << ','
        << soda_label_name(report.labels[static_cast<std::size_t>(i)]) << '\n';
  atomic_write_text(a.out_prefix + ".csv", csv.str());
  atomic_write_text(a.out_prefix + ".svg", soda_plot_svg(report));

  int counts[4] = {0, 0, 0, 0};
  for (SodaLabel l : report.labels) ++counts[static_cast<int>(l)];
  std::cout << "regular=" << counts[0] << " good_leverage=" << counts[1]
            << " orthogonal_outlier=" << counts[2] << " bad_leverage=" << counts[3]
            << " sd_cut=" << format_double(report.sd_cut)
            << " od_cut=" << format_double(report.od_cut) << '\n';
  return 0;
}

struct ShapleyArgs {
  std::string model;
  std::string data;
  long id = 0;
  std::string out;
};

std::string swap_extension_to_csv(const std::string& path) {
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  if (dot != std::string::npos && (slash == std::string::npos || dot > slash))
    return path.substr(0, dot) + ".csv";
  return path + ".csv";
}

int cmd_shapley(const ShapleyArgs& a) {
  HrfpcaModel model = read_model(a.model);
  MatrixDataset data = read_dataset(a.data);

  int row = -1;
  for (int i = 0; i < data.n(); ++i)
    if (data.ids[static_cast<std::size_t>(i)] == a.id) {
      row = i;
      break;
    }
  if (row < 0)
    throw ArgumentError("--id: no observation with id " + std::to_string(a.id));

  Eigen::MatrixXd phi =
      shapley_cellwise(data.samples[static_cast<std::size_t>(row)], model.params);
  atomic_write_text(a.out, shapley_heatmap_svg(phi, a.id));

  std::ostringstream csv;
  csv << "r,c,phi\n";
  for (int r = 0; r < phi.rows(); ++r)
    for (int c = 0; c < phi.cols(); ++c)
      csv << r << ',' << c << ',' << format_double(phi(r, c)) << '\n';
  const std::string csv_path = swap_extension_to_csv(a.out);
  atomic_write_text(csv_path, csv.str());

  std::cout << "total=" << format_double(phi.sum()) << " wrote " << a.out << " and "
            << csv_path << '\n';
  return 0;
}

struct ScreeArgs {
  std::string model;
  std::string out;
};

int cmd_scree(const ScreeArgs& a) {
  HrfpcaModel model = read_model(a.model);
  ScreeData sd = scree(model.params);
  atomic_write_text(a.out, scree_plot_svg(sd));

  auto print_spectrum = [](const char* name, const Eigen::VectorXd& w) {
    std::cout << name;
    char buf[32];
    for (Eigen::Index i = 0; i < w.size(); ++i) {
      std::snprintf(buf, sizeof(buf), " %.6g", w(i));
      std::cout << buf;
    }
    std::cout << '\n';
  };
  print_spectrum("column eigenvalues:", sd.col_eigenvalues);
  print_spectrum("row eigenvalues:", sd.row_eigenvalues);
  std::cout << "suggested ranks: q_c=" << sd.suggested_q_c
            << " q_r=" << sd.suggested_q_r << '\n';
  return 0;
}

struct BenchArgs {
  std::string population = "data1";
  std::vector<std::string> kinds = {"PC"};
  std::vector<std::string> sits = {"1"};
  std::vector<double> props = {0.1};
  int reps = 50;
  std::vector<std::string> methods = {"hrfpca", "fpca"};
  std::uint64_t seed = 0;
  int starts = 0;
  bool raw = false;
  bool knn = false;
  std::string out;
};

int cmd_bench(const BenchArgs& a) {
  BenchOptions opt;
  opt.population = a.population;
  opt.kinds.clear();
  for (const std::string& k : a.kinds) opt.kinds.push_back(parse_outlier_kind(k));
  opt.sits.clear();
  for (const std::string& s : a.sits) opt.sits.push_back(situation_from_token(s));
  opt.props = a.props;
  opt.reps = a.reps;
  opt.methods.clear();
  for (const std::string& m : a.methods) opt.methods.push_back(parse_method(m));
  opt.seed = a.seed;
  if (a.starts > 0) opt.mmcd.n_starts = a.starts;
  opt.use_raw = a.raw;
  opt.knn = a.knn;

  std::vector<BenchCellResult> cells = run_benchmark(opt);
  atomic_write_text(a.out, benchmark_csv(cells, opt.reps, opt.seed, opt.knn));
  std::cout << "wrote " << cells.size() << " cells to " << a.out << '\n';
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{"robust factored PCA for matrix-valued data"};
  app.require_subcommand(1);
  app.fallthrough();

  int threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = library default)")
      ->envname("MATPCA_THREADS");

  SimulateArgs sim;
  CLI::App* c_sim = app.add_subcommand("simulate", "generate a synthetic dataset");
  c_sim->add_option("--population", sim.population, "data1 or data2")->required();
  c_sim->add_option("--contaminate", sim.kind,
                    "none, PC, OC, PC_OC, raw_uniform or mixed");
  c_sim->add_option("--sit", sim.sit, "contamination range preset 1-4");
  c_sim->add_option("--prop", sim.prop, "contaminated proportion in [0, 0.5]");
  c_sim->add_option("--seed", sim.seed, "generator seed");
  c_sim->add_option("--out", sim.out, "output dataset path")->required();

  FitArgs fit;
  CLI::App* c_fit = app.add_subcommand("fit", "fit a factored PCA model");
  // Free the short -h so the subset-size flag below can be spelled --h.
  c_fit->set_help_flag("--help", "print this help message and exit");
  c_fit->add_option("--data", fit.data, "input dataset")->required();
  c_fit->add_option("--qc", fit.qc, "column rank")->required()->check(CLI::Range(1, 1 << 20));
  c_fit->add_option("--qr", fit.qr, "row rank")->required()->check(CLI::Range(1, 1 << 20));
  c_fit->add_option("--method", fit.method, "hrfpca or fpca");
  c_fit->add_option("--h", fit.h, "subset size (default (n+d+2)/2)");
  c_fit->add_option("--starts", fit.starts, "elemental starts (default 500)");
  c_fit->add_option("--seed", fit.seed, "search seed");
  c_fit->add_option("--out", fit.out, "output model path")->required();

  ModelDataArgs det;
  CLI::App* c_det = app.add_subcommand("detect", "flag outliers by robust distance");
  c_det->add_option("--model", det.model, "model file")->required();
  c_det->add_option("--data", det.data, "input dataset")->required();
  c_det->add_option("--alpha", det.alpha, "cutoff level (default 0.975)");
  c_det->add_option("--out", det.out, "output CSV path")->required();

  SodaArgs soda;
  CLI::App* c_soda = app.add_subcommand("soda", "SD/OD diagnostics and plot");
  c_soda->add_option("--model", soda.model, "model file")->required();
  c_soda->add_option("--data", soda.data, "input dataset")->required();
  c_soda->add_option("--out-prefix", soda.out_prefix, "output prefix")->required();
  c_soda->add_option("--od-convention", soda.convention, "squared or norm");

  ShapleyArgs shap;
  CLI::App* c_shap = app.add_subcommand("shapley", "cellwise explanation for one observation");
  c_shap->add_option("--model", shap.model, "model file")->required();
  c_shap->add_option("--data", shap.data, "input dataset")->required();
  c_shap->add_option("--id", shap.id, "observation id")->required();
  c_shap->add_option("--out", shap.out, "output SVG path")->required();

  ScreeArgs scr;
  CLI::App* c_scr = app.add_subcommand("scree", "eigenvalue spectra and suggestion");
  c_scr->add_option("--model", scr.model, "model file")->required();
  c_scr->add_option("--out", scr.out, "output SVG path")->required();

  BenchArgs ben;
  CLI::App* c_ben = app.add_subcommand("bench", "Monte-Carlo relative-difference sweep");
  c_ben->add_option("--population", ben.population, "data1 or data2");
  c_ben->add_option("--kinds", ben.kinds, "outlier kinds")->delimiter(',');
  c_ben->add_option("--sits", ben.sits, "situations 1-4")->delimiter(',');
  c_ben->add_option("--props", ben.props, "contamination proportions")->delimiter(',');
  c_ben->add_option("--reps", ben.reps, "replications per cell (default 50)");
  c_ben->add_option("--methods", ben.methods, "hrfpca,fpca")->delimiter(',');
  c_ben->add_option("--seed", ben.seed, "master seed");
  c_ben->add_option("--starts", ben.starts, "MMCD elemental starts");
  c_ben->add_flag("--raw", ben.raw, "score raw (pre-reweighting) estimates");
  c_ben->add_flag("--knn", ben.knn, "append 1-NN outlier-label error column");
  c_ben->add_option("--out", ben.out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);  // prints the message
    return 2;
  }

  set_threads(threads);

  if (app.got_subcommand(c_sim)) return cmd_simulate(sim);
  if (app.got_subcommand(c_fit)) return cmd_fit(fit);
  if (app.got_subcommand(c_det)) return cmd_detect(det);
  if (app.got_subcommand(c_soda)) return cmd_soda(soda);
  if (app.got_subcommand(c_shap)) return cmd_shapley(shap);
  if (app.got_subcommand(c_scr)) return cmd_scree(scr);
  if (app.got_subcommand(c_ben)) return cmd_bench(ben);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const CapacityError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const InsufficientDataError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const EstimationError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
