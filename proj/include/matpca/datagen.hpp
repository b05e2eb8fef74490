#pragma once

// Synthetic populations (data1, data2), matrix-normal sampling, outlier
// contamination under the four uniform regimes, and the relative-difference
// metric used by the benchmark harness.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "matpca/dataset.hpp"
#include "matpca/matnorm.hpp"

namespace matpca {

struct PopulationSpec {
  std::string name;       // "data1", "data2", or free-form
  int n = 0;              // sample count
  Eigen::MatrixXd M;      // d_c x d_r mean
  Eigen::VectorXd eig_c;  // positive, descending
  Eigen::VectorXd eig_r;
  Eigen::MatrixXd U_c;    // full d_c x d_c orthonormal basis
  Eigen::MatrixXd U_r;    // full d_r x d_r orthonormal basis
  int q_c = 0;            // generating ranks
  int q_r = 0;
  std::uint64_t seed = 0;

  int d_c() const { return static_cast<int>(M.rows()); }
  int d_r() const { return static_cast<int>(M.cols()); }
  MatNormalParams params() const;  // (M, U_c diag(eig_c) U_c', U_r diag(eig_r) U_r')
  void validate() const;
};

enum class OutlierKind { kPc, kOc, kPcOc, kRawUniform };
enum class Situation { kSitI, kSitII, kSitIII, kSitIV };

const char* outlier_kind_name(OutlierKind k);
OutlierKind parse_outlier_kind(const std::string& name);
const char* situation_name(Situation s);
Situation parse_situation(const std::string& name);
std::pair<double, double> situation_range(Situation s);

struct ContaminationSpec {
  OutlierKind kind = OutlierKind::kPc;
  double proportion = 0.0;  // in [0, 0.5]
  double a = 0.0;           // uniform range, a < b
  double b = 0.0;
  std::uint64_t seed = 0;
};

// Disjoint +-1/sqrt(2) pair vectors u_1..u_k as columns; requires dim >= 2k.
Eigen::MatrixXd canonical_pcs(int dim, int k);

// Named populations; remaining eigenvectors completed by Gram-Schmidt of the
// canonical basis against the designated leading ones.
PopulationSpec build_population(const std::string& name, std::uint64_t seed = 0);

// X_i = M + A G_i B' with A, B the symmetric square roots of the covariances
// and G_i standard normal; each observation draws from its own keyed stream.
MatrixDataset sample_matrix_normal(const PopulationSpec& spec);

// Adds spikes to floor(n*p) observations chosen without replacement (or, for
// kRawUniform, replaces their entries with U(a,b) draws). PC spikes live in
// the generating PC subspace scaled by the leading singular structure,
// U_c diag(sqrt(eig_c)) S diag(sqrt(eig_r)) U_r'; OC spikes live in its
// orthogonal complement, P_c_perp A_c N A_r P_r_perp; PC_OC adds one of
// each. Modifies data in place and returns the sorted outlier indices.
std::vector<int> contaminate(MatrixDataset& data, const PopulationSpec& truth,
                             const ContaminationSpec& spec);

// Same spike construction applied to a caller-chosen index set.
void contaminate_indices(MatrixDataset& data, const PopulationSpec& truth,
                         OutlierKind kind, double a, double b,
                         std::uint64_t seed, const std::vector<int>& indices);

struct MixedContamination {
  std::vector<int> pc;
  std::vector<int> oc;
  std::vector<int> pc_oc;
};

// floor(n*p) indices split into near-equal thirds (remainder to the earlier
// kinds): PC, then OC, then PC_OC.
MixedContamination contaminate_mixed(MatrixDataset& data,
                                     const PopulationSpec& truth, double p,
                                     double a, double b, std::uint64_t seed);

// || Sigma_r (x) Sigma_c  -  est_r (x) est_c ||_F / || Sigma_r (x) Sigma_c ||_F
// evaluated without materializing the Kronecker products.
double relative_difference(const MatNormalParams& truth, const MatNormalParams& est);

}  // namespace matpca
