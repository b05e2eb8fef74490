#include "matpca/hrfpca.hpp"

#include <cmath>
#include <limits>

#include "matpca/errors.hpp"
#include "matpca/kernels.hpp"
#include "matpca/robust_stats.hpp"

namespace matpca {

namespace {

void check_shape(const HrfpcaModel& model, const Eigen::MatrixXd& X) {
  if (X.rows() != model.params.d_c() || X.cols() != model.params.d_r())
    throw ShapeError("observation is " + std::to_string(X.rows()) + "x" +
                     std::to_string(X.cols()) + " but the model expects " +
                     std::to_string(model.params.d_c()) + "x" +
                     std::to_string(model.params.d_r()));
}

void check_eigenvalues(const HrfpcaModel& model) {
  if (model.pcs.lambda_c.minCoeff() <= 0.0 || model.pcs.lambda_r.minCoeff() <= 0.0)
    throw NumericalError("kept eigenvalue is not positive; reduce q_c/q_r");
}

}  // namespace

const char* method_name(Method m) {
  return m == Method::kHrfpca ? "hrfpca" : "fpca";
}

Method parse_method(const std::string& name) {
  if (name == "hrfpca") return Method::kHrfpca;
  if (name == "fpca") return Method::kFpca;
  throw ArgumentError("unknown method '" + name + "' (expected hrfpca or fpca)");
}

const char* od_convention_name(OdConvention c) {
  return c == OdConvention::kSquared ? "squared" : "norm";
}

OdConvention parse_od_convention(const std::string& name) {
  if (name == "squared") return OdConvention::kSquared;
  if (name == "norm") return OdConvention::kNorm;
  throw ArgumentError("unknown od convention '" + name +
                      "' (expected squared or norm)");
}

const char* soda_label_name(SodaLabel label) {
  switch (label) {
    case SodaLabel::kRegular: return "regular";
    case SodaLabel::kGoodLeverage: return "good_leverage";
    case SodaLabel::kOrthogonalOutlier: return "orthogonal_outlier";
    case SodaLabel::kBadLeverage: return "bad_leverage";
  }
  return "regular";
}

HrfpcaModel fit_model(const MatrixDataset& data, int q_c, int q_r, Method method,
                      const MmcdConfig& config) {
  data.validate();
  if (q_c < 1 || q_c > data.d_c || q_r < 1 || q_r > data.d_r)
    throw ArgumentError("rank (" + std::to_string(q_c) + ", " + std::to_string(q_r) +
                        ") outside [1, d_c] x [1, d_r]");

  HrfpcaModel model;
  model.q_c = q_c;
  model.q_r = q_r;
  model.method = method;
  if (method == Method::kHrfpca) {
    MmcdFit fit = raw_mmcd(data, config);
    reweight_mmcd(data, fit);
    model.params = fit.reweighted_params;
    model.mmcd = std::move(fit);
  } else {
    FlipflopResult fit = flipflop_fit(data);
    model.params = fit.params;
  }
  model.pcs = eigendecompose_params(model.params, q_c, q_r);
  return model;
}

Eigen::MatrixXd project_scores(const HrfpcaModel& model, const Eigen::MatrixXd& X) {
  check_shape(model, X);
  return model.pcs.U_c.transpose() * (X - model.params.M) * model.pcs.U_r;
}

Eigen::MatrixXd whitened_scores(const HrfpcaModel& model, const Eigen::MatrixXd& X) {
  check_shape(model, X);
  check_eigenvalues(model);
  Eigen::MatrixXd centered = model.centered_scores ? (X - model.params.M).eval() : X;
  Eigen::MatrixXd Z = model.pcs.U_c.transpose() * centered * model.pcs.U_r;
  Eigen::ArrayXd sc = model.pcs.lambda_c.array().sqrt().inverse();
  Eigen::ArrayXd sr = model.pcs.lambda_r.array().sqrt().inverse();
  return sc.matrix().asDiagonal() * Z * sr.matrix().asDiagonal();
}

double score_distance(const HrfpcaModel& model, const Eigen::MatrixXd& X) {
  check_shape(model, X);
  check_eigenvalues(model);
  Eigen::MatrixXd Z = model.pcs.U_c.transpose() * (X - model.params.M) * model.pcs.U_r;
  double acc = 0.0;
  for (int k = 0; k < model.q_c; ++k)
    for (int j = 0; j < model.q_r; ++j)
      acc += Z(k, j) * Z(k, j) / (model.pcs.lambda_c(k) * model.pcs.lambda_r(j));
  return std::sqrt(acc);
}

double orthogonal_distance(const HrfpcaModel& model, const Eigen::MatrixXd& X,
                           OdConvention convention) {
  check_shape(model, X);
  Eigen::MatrixXd centered = X - model.params.M;
  Eigen::MatrixXd Z = model.pcs.U_c.transpose() * centered * model.pcs.U_r;
  Eigen::MatrixXd R = centered - model.pcs.U_c * Z * model.pcs.U_r.transpose();
  double od2 = R.squaredNorm();
  return convention == OdConvention::kSquared ? od2 : std::sqrt(od2);
}

std::pair<double, double> soda_thresholds(const HrfpcaModel& model,
                                          const MatrixDataset& data,
                                          OdConvention convention) {
  const int n = data.n();
  if (n < 4) throw InsufficientDataError("soda thresholds need at least 4 observations");

  const double sd_cut =
      std::sqrt(chi2_quantile(static_cast<double>(model.q_c) * model.q_r, 0.975));

  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double od = orthogonal_distance(model, data.samples[static_cast<std::size_t>(i)],
                                    convention);
    t[static_cast<std::size_t>(i)] = std::cbrt(od * od);
  }
  UnivariateMcdResult mcd = univariate_mcd(t);
  double base = mcd.estimate.location +
                mcd.estimate.scale * std_normal_quantile(0.975);
  if (base < 0.0) base = 0.0;
  const double od_cut = std::pow(base, 1.5);
  return {sd_cut, od_cut};
}

SodaReport classify_soda(const HrfpcaModel& model, const MatrixDataset& data,
                         OdConvention convention) {
  const int n = data.n();
  SodaReport report;
  report.convention = convention;
  report.sd.resize(static_cast<std::size_t>(n));
  report.od.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const Eigen::MatrixXd& X = data.samples[static_cast<std::size_t>(i)];
    report.sd[static_cast<std::size_t>(i)] = score_distance(model, X);
    report.od[static_cast<std::size_t>(i)] = orthogonal_distance(model, X, convention);
  }
  std::tie(report.sd_cut, report.od_cut) = soda_thresholds(model, data, convention);

  report.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const bool sd_out = report.sd[static_cast<std::size_t>(i)] > report.sd_cut;
    const bool od_out = report.od[static_cast<std::size_t>(i)] > report.od_cut;
    SodaLabel label = SodaLabel::kRegular;
    if (sd_out && od_out)
      label = SodaLabel::kBadLeverage;
    else if (sd_out)
      label = SodaLabel::kGoodLeverage;
    else if (od_out)
      label = SodaLabel::kOrthogonalOutlier;
    report.labels[static_cast<std::size_t>(i)] = label;
  }
  return report;
}

DetectionReport detect_outliers(const MatNormalParams& params,
                                const MatrixDataset& data, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw ArgumentError("detect_outliers: alpha must lie in (0, 1)");
  data.validate();
  if (data.d_c != params.d_c() || data.d_r != params.d_r())
    throw ShapeError("detect_outliers: dataset and parameter shapes differ");

  DetectionReport report;
  CovFactors f = factorize(params);
  report.mmd2 = mmd2_batch(data, params, f);
  report.cutoff = chi2_quantile(static_cast<double>(data.d_c) * data.d_r, alpha);
  report.flags.resize(report.mmd2.size());
  for (std::size_t i = 0; i < report.mmd2.size(); ++i)
    report.flags[i] = report.mmd2[i] > report.cutoff ? 1 : 0;
  return report;
}

Eigen::MatrixXd shapley_cellwise(const Eigen::MatrixXd& X,
                                 const MatNormalParams& params) {
  if (X.rows() != params.d_c() || X.cols() != params.d_r())
    throw ShapeError("shapley_cellwise: observation shape mismatch");
  CovFactors f = factorize(params);
  Eigen::MatrixXd D = X - params.M;
  Eigen::MatrixXd B = f.llt_c.solve(D);                       // Sigma_c^{-1} D
  Eigen::MatrixXd C = f.llt_r.solve(B.transpose()).transpose();  // ... Sigma_r^{-1}
  return D.cwiseProduct(C);
}

int suggest_rank(const Eigen::VectorXd& eigenvalues_desc) {
  const int d = static_cast<int>(eigenvalues_desc.size());
  if (d <= 1) return d;
  int best_k = 1;
  double best_gap = -std::numeric_limits<double>::infinity();
  for (int k = 1; k < d; ++k) {
    const double w = eigenvalues_desc(k - 1);
    const double w_next = eigenvalues_desc(k);
    double gap;
    if (w_next > 0.0)
      gap = (w - w_next) / w_next;
    else
      gap = w > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    if (gap > best_gap) {
      best_gap = gap;
      best_k = k;
    }
  }
  return best_k;
}

ScreeData scree(const MatNormalParams& params) {
  FactoredPCs pcs = eigendecompose_params(params, params.d_c(), params.d_r());
  ScreeData data;
  data.col_eigenvalues = pcs.lambda_c;
  data.row_eigenvalues = pcs.lambda_r;
  data.suggested_q_c = suggest_rank(data.col_eigenvalues);
  data.suggested_q_r = suggest_rank(data.row_eigenvalues);
  return data;
}

}  // namespace matpca
