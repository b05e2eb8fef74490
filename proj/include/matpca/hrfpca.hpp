#pragma once

// Factored principal components from robust covariance estimates, plus the
// diagnostic toolkit built on them: score / orthogonal distances, SODA
// classification, Mahalanobis outlier flags, cellwise Shapley values and
// scree data.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "matpca/dataset.hpp"
#include "matpca/matnorm.hpp"
#include "matpca/mmcd.hpp"

namespace matpca {

enum class Method { kHrfpca, kFpca };

// Orthogonal distances can be reported as tr{R'R} (squared Frobenius norm,
// the default) or as the unsquared norm used by some of the PCA literature.
enum class OdConvention { kSquared, kNorm };

enum class SodaLabel { kRegular, kGoodLeverage, kOrthogonalOutlier, kBadLeverage };

const char* method_name(Method m);
Method parse_method(const std::string& name);
const char* od_convention_name(OdConvention c);
OdConvention parse_od_convention(const std::string& name);
const char* soda_label_name(SodaLabel label);

struct HrfpcaModel {
  MatNormalParams params;   // robust (or plain ML) estimates
  FactoredPCs pcs;          // leading q_c / q_r eigenpairs of params
  int q_c = 0;
  int q_r = 0;
  Method method = Method::kHrfpca;
  bool centered_scores = true;  // whitened scores subtract M before projecting
  std::optional<MmcdFit> mmcd;  // provenance; absent for plain flip-flop fits
};

// Fits the two-stage model: robust Stage 1 (reweighted MMCD) or plain
// flip-flop ML for method kFpca, then the truncated eigendecomposition.
HrfpcaModel fit_model(const MatrixDataset& data, int q_c, int q_r,
                      Method method = Method::kHrfpca,
                      const MmcdConfig& config = {});

// Z = U_c' (X - M) U_r, shape q_c x q_r.
Eigen::MatrixXd project_scores(const HrfpcaModel& model, const Eigen::MatrixXd& X);

// Lambda_c^{-1/2} U_c' (X - M) U_r Lambda_r^{-1/2}; the centering term is
// dropped when model.centered_scores is false.
Eigen::MatrixXd whitened_scores(const HrfpcaModel& model, const Eigen::MatrixXd& X);

// SD = sqrt(sum_{kj} z_kj^2 / (lambda_ck lambda_rj)).
double score_distance(const HrfpcaModel& model, const Eigen::MatrixXd& X);

// Distance from X to the PC subspace; see OdConvention.
double orthogonal_distance(const HrfpcaModel& model, const Eigen::MatrixXd& X,
                           OdConvention convention = OdConvention::kSquared);

struct SodaReport {
  std::vector<double> sd;
  std::vector<double> od;
  double sd_cut = 0.0;
  double od_cut = 0.0;
  OdConvention convention = OdConvention::kSquared;
  std::vector<SodaLabel> labels;
};

// sd_cut = sqrt(chi2_quantile(q_c*q_r, 0.975)); od_cut via the Wilson-
// Hilferty route: univariate MCD location/scale of od^{2/3}, cut at the
// 0.975 normal quantile, mapped back through the 3/2 power.
std::pair<double, double> soda_thresholds(const HrfpcaModel& model,
                                          const MatrixDataset& data,
                                          OdConvention convention = OdConvention::kSquared);

SodaReport classify_soda(const HrfpcaModel& model, const MatrixDataset& data,
                         OdConvention convention = OdConvention::kSquared);

struct DetectionReport {
  std::vector<double> mmd2;
  double cutoff = 0.0;
  std::vector<int> flags;  // 1 = flagged as outlier
};

// Flags observation i when mmd2(X_i) exceeds the chi-square(d_c*d_r)
// quantile at level alpha.
DetectionReport detect_outliers(const MatNormalParams& params,
                                const MatrixDataset& data, double alpha = 0.975);

// Phi(X) = (X - M) o [Sigma_c^{-1} (X - M) Sigma_r^{-1}] (elementwise
// product); entries sum to mmd2(X).
Eigen::MatrixXd shapley_cellwise(const Eigen::MatrixXd& X,
                                 const MatNormalParams& params);

struct ScreeData {
  Eigen::VectorXd col_eigenvalues;  // descending, length d_c
  Eigen::VectorXd row_eigenvalues;  // descending, length d_r
  int suggested_q_c = 1;            // largest relative gap
  int suggested_q_r = 1;
};

ScreeData scree(const MatNormalParams& params);

// Rank whose trailing relative eigenvalue gap (w_k - w_{k+1}) / w_{k+1} is
// largest; ties resolve to the smallest rank.
int suggest_rank(const Eigen::VectorXd& eigenvalues_desc);

}  // namespace matpca
