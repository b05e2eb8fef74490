#include "matpca/datagen.hpp"

#include <algorithm>
#include <cmath>

#include "matpca/errors.hpp"
#include "matpca/rng.hpp"

namespace matpca {

namespace {

Eigen::VectorXd linspace(double a, double b, int m) {
  Eigen::VectorXd v(m);
  if (m == 1) {
    v(0) = a;
    return v;
  }
  for (int i = 0; i < m; ++i) v(i) = a + (b - a) * i / (m - 1);
  return v;
}

// Symmetric square root from a declared spectrum: U diag(sqrt(w)) U'.
Eigen::MatrixXd sqrt_from_spectrum(const Eigen::MatrixXd& U,
                                   const Eigen::VectorXd& w) {
  return U * w.array().sqrt().matrix().asDiagonal() * U.transpose();
}

// Completes the designated leading columns to a full orthonormal basis by
// Gram-Schmidt over e_1, e_2, ... in index order, skipping dependents.
Eigen::MatrixXd complete_basis(const Eigen::MatrixXd& lead, int dim) {
  Eigen::MatrixXd U(dim, dim);
  int cols = static_cast<int>(lead.cols());
  U.leftCols(cols) = lead;
  for (int e = 0; e < dim && cols < dim; ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(dim);
    v(e) = 1.0;
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j < cols; ++j) v -= U.col(j).dot(v) * U.col(j);
    double nv = v.norm();
    if (nv <= 1e-8) continue;
    U.col(cols++) = v / nv;
  }
  if (cols < dim)
    throw NumericalError("basis completion failed: canonical vectors exhausted");
  return U;
}

Eigen::VectorXd concat(std::initializer_list<Eigen::VectorXd> parts) {
  int total = 0;
  for (const auto& p : parts) total += static_cast<int>(p.size());
  Eigen::VectorXd out(total);
  int at = 0;
  for (const auto& p : parts) {
    out.segment(at, p.size()) = p;
    at += static_cast<int>(p.size());
  }
  return out;
}

Eigen::VectorXd scalars(std::initializer_list<double> vals) {
  Eigen::VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v(i++) = x;
  return v;
}

}  // namespace

MatNormalParams PopulationSpec::params() const {
  MatNormalParams p;
  p.M = M;
  p.sigma_c = U_c * eig_c.asDiagonal() * U_c.transpose();
  p.sigma_r = U_r * eig_r.asDiagonal() * U_r.transpose();
  return p;
}

void PopulationSpec::validate() const {
  const int dc = d_c();
  const int dr = d_r();
  if (n < 1) throw ArgumentError("population: n must be positive");
  if (dc < 1 || dr < 1) throw ShapeError("population: empty mean matrix");
  if (eig_c.size() != dc || eig_r.size() != dr)
    throw ShapeError("population: spectrum length does not match shape");
  for (int i = 0; i < dc; ++i) {
    if (!(eig_c(i) > 0.0)) throw ArgumentError("population: column eigenvalues must be positive");
    if (i > 0 && eig_c(i) > eig_c(i - 1))
      throw ArgumentError("population: column eigenvalues must be descending");
  }
  for (int i = 0; i < dr; ++i) {
    if (!(eig_r(i) > 0.0)) throw ArgumentError("population: row eigenvalues must be positive");
    if (i > 0 && eig_r(i) > eig_r(i - 1))
      throw ArgumentError("population: row eigenvalues must be descending");
  }
  if (U_c.rows() != dc || U_c.cols() != dc || U_r.rows() != dr || U_r.cols() != dr)
    throw ShapeError("population: basis shape does not match covariance shape");
  if ((U_c.transpose() * U_c - Eigen::MatrixXd::Identity(dc, dc)).cwiseAbs().maxCoeff() > 1e-12 ||
      (U_r.transpose() * U_r - Eigen::MatrixXd::Identity(dr, dr)).cwiseAbs().maxCoeff() > 1e-12)
    throw ArgumentError("population: basis is not orthonormal to 1e-12");
  if (q_c < 1 || q_c > dc || q_r < 1 || q_r > dr)
    throw ArgumentError("population: generating ranks out of range");
}

const char* outlier_kind_name(OutlierKind k) {
  switch (k) {
    case OutlierKind::kPc: return "PC";
    case OutlierKind::kOc: return "OC";
    case OutlierKind::kPcOc: return "PC_OC";
    case OutlierKind::kRawUniform: return "raw_uniform";
  }
  return "PC";
}

OutlierKind parse_outlier_kind(const std::string& name) {
  if (name == "PC") return OutlierKind::kPc;
  if (name == "OC") return OutlierKind::kOc;
  if (name == "PC_OC") return OutlierKind::kPcOc;
  if (name == "raw_uniform") return OutlierKind::kRawUniform;
  throw ArgumentError("unknown outlier kind '" + name +
                      "' (expected PC, OC, PC_OC or raw_uniform)");
}

const char* situation_name(Situation s) {
  switch (s) {
    case Situation::kSitI: return "sit1";
    case Situation::kSitII: return "sit2";
    case Situation::kSitIII: return "sit3";
    case Situation::kSitIV: return "sit4";
  }
  return "sit1";
}

Situation parse_situation(const std::string& name) {
  if (name == "sit1") return Situation::kSitI;
  if (name == "sit2") return Situation::kSitII;
  if (name == "sit3") return Situation::kSitIII;
  if (name == "sit4") return Situation::kSitIV;
  throw ArgumentError("unknown situation '" + name + "' (expected sit1..sit4)");
}

std::pair<double, double> situation_range(Situation s) {
  switch (s) {
    case Situation::kSitI: return {-100.0, 100.0};
    case Situation::kSitII: return {-10000.0, 10000.0};
    case Situation::kSitIII: return {100.0, 110.0};
    case Situation::kSitIV: return {10000.0, 11000.0};
  }
  return {-100.0, 100.0};
}

Eigen::MatrixXd canonical_pcs(int dim, int k) {
  if (k < 1 || k > 3) throw ArgumentError("canonical_pcs: k must be 1, 2 or 3");
  if (dim < 2 * k)
    throw ArgumentError("canonical_pcs: dim = " + std::to_string(dim) +
                        " too small for " + std::to_string(k) + " pair vectors");
  Eigen::MatrixXd U = Eigen::MatrixXd::Zero(dim, k);
  const double r = 1.0 / std::sqrt(2.0);
  for (int j = 0; j < k; ++j) {
    U(2 * j, j) = r;
    U(2 * j + 1, j) = -r;
  }
  return U;
}

PopulationSpec build_population(const std::string& name, std::uint64_t seed) {
  PopulationSpec spec;
  spec.name = name;
  spec.seed = seed;
  if (name == "data1") {
    spec.n = 1000;
    spec.M = Eigen::MatrixXd::Zero(4, 10);
    spec.eig_c = concat({scalars({5.0}), linspace(0.8, 0.5, 3)});
    spec.eig_r = concat({scalars({4.0, 3.0, 2.0}), linspace(0.5, 0.3, 7)});
    spec.U_c = complete_basis(canonical_pcs(4, 1), 4);
    spec.U_r = complete_basis(canonical_pcs(10, 3), 10);
    spec.q_c = 1;
    spec.q_r = 3;
  } else if (name == "data2") {
    spec.n = 200;
    spec.M = Eigen::MatrixXd::Constant(10, 8, 5.0);
    spec.eig_c = concat({scalars({5.0, 4.0, 3.0}), linspace(0.8, 0.5, 7)});
    spec.eig_r = concat({scalars({4.0, 3.0}), linspace(0.5, 0.3, 6)});
    spec.U_c = complete_basis(canonical_pcs(10, 3), 10);
    spec.U_r = complete_basis(canonical_pcs(8, 2), 8);
    spec.q_c = 3;
    spec.q_r = 2;
  } else {
    throw ArgumentError("unknown population '" + name + "' (expected data1 or data2)");
  }
  spec.validate();
  return spec;
}

MatrixDataset sample_matrix_normal(const PopulationSpec& spec) {
  spec.validate();
  const int dc = spec.d_c();
  const int dr = spec.d_r();
  Eigen::MatrixXd A = sqrt_from_spectrum(spec.U_c, spec.eig_c);
  Eigen::MatrixXd B = sqrt_from_spectrum(spec.U_r, spec.eig_r);

  MatrixDataset data;
  data.d_c = dc;
  data.d_r = dr;
  data.samples.resize(static_cast<std::size_t>(spec.n));
  data.ids.resize(static_cast<std::size_t>(spec.n));
  for (int i = 0; i < spec.n; ++i) {
    KeyedRng rng(spec.seed, kStreamSample, static_cast<std::uint64_t>(i));
    Eigen::MatrixXd G(dc, dr);
    for (int r = 0; r < dc; ++r)
      for (int c = 0; c < dr; ++c) G(r, c) = rng.normal();
    data.samples[static_cast<std::size_t>(i)] = spec.M + A * G * B.transpose();
    data.ids[static_cast<std::size_t>(i)] = i;
  }
  return data;
}

void contaminate_indices(MatrixDataset& data, const PopulationSpec& truth,
                         OutlierKind kind, double a, double b,
                         std::uint64_t seed, const std::vector<int>& indices) {
  truth.validate();
  if (!(a < b)) throw ArgumentError("contaminate: need a < b for the uniform range");
  if (data.d_c != truth.d_c() || data.d_r != truth.d_r())
    throw ShapeError("contaminate: dataset shape differs from the population");
  const int n = data.n();
  const int dc = truth.d_c();
  const int dr = truth.d_r();
  const int qc = truth.q_c;
  const int qr = truth.q_r;

  Eigen::MatrixXd Uc = truth.U_c.leftCols(qc);
  Eigen::MatrixXd Ur = truth.U_r.leftCols(qr);
  Eigen::VectorXd rlc = truth.eig_c.head(qc).array().sqrt();
  Eigen::VectorXd rlr = truth.eig_r.head(qr).array().sqrt();
  Eigen::MatrixXd Pc_perp = Eigen::MatrixXd::Identity(dc, dc) - Uc * Uc.transpose();
  Eigen::MatrixXd Pr_perp = Eigen::MatrixXd::Identity(dr, dr) - Ur * Ur.transpose();
  Eigen::MatrixXd Ac = sqrt_from_spectrum(truth.U_c, truth.eig_c);
  Eigen::MatrixXd Ar = sqrt_from_spectrum(truth.U_r, truth.eig_r);

  for (int i : indices) {
    if (i < 0 || i >= n) throw ArgumentError("contaminate: index out of range");
    KeyedRng rng(seed, kStreamSpike, static_cast<std::uint64_t>(i));
    Eigen::MatrixXd& X = data.samples[static_cast<std::size_t>(i)];
    if (kind == OutlierKind::kRawUniform) {
      for (int r = 0; r < dc; ++r)
        for (int c = 0; c < dr; ++c) X(r, c) = rng.uniform(a, b);
      continue;
    }
    Eigen::MatrixXd add = Eigen::MatrixXd::Zero(dc, dr);
    if (kind == OutlierKind::kPc || kind == OutlierKind::kPcOc) {
      Eigen::MatrixXd S(qc, qr);
      for (int r = 0; r < qc; ++r)
        for (int c = 0; c < qr; ++c) S(r, c) = rng.uniform(a, b);
      add += Uc * rlc.asDiagonal() * S * rlr.asDiagonal() * Ur.transpose();
    }
    if (kind == OutlierKind::kOc || kind == OutlierKind::kPcOc) {
      Eigen::MatrixXd N(dc, dr);
      for (int r = 0; r < dc; ++r)
        for (int c = 0; c < dr; ++c) N(r, c) = rng.uniform(a, b);
      add += Pc_perp * Ac * N * Ar.transpose() * Pr_perp;
    }
    X += add;
  }
}

std::vector<int> contaminate(MatrixDataset& data, const PopulationSpec& truth,
                             const ContaminationSpec& spec) {
  if (spec.proportion < 0.0) throw ArgumentError("contaminate: negative proportion");
  if (spec.proportion > 0.5)
    throw ArgumentError("contaminate: proportion above 0.5 exceeds any breakdown guarantee");
  const int n = data.n();
  const int m = static_cast<int>(std::floor(n * spec.proportion));
  if (spec.proportion > 0.0 && m < 1)
    throw ArgumentError("contaminate: proportion too small to pick an observation");
  if (m == 0) return {};

  KeyedRng rng(spec.seed, kStreamSelect);
  std::vector<int> idx = rng.sample_without_replacement(n, m);
  std::sort(idx.begin(), idx.end());
  contaminate_indices(data, truth, spec.kind, spec.a, spec.b, spec.seed, idx);
  return idx;
}

MixedContamination contaminate_mixed(MatrixDataset& data,
                                     const PopulationSpec& truth, double p,
                                     double a, double b, std::uint64_t seed) {
  if (p < 0.0 || p > 0.5) throw ArgumentError("contaminate_mixed: proportion out of [0, 0.5]");
  const int n = data.n();
  const int m = static_cast<int>(std::floor(n * p));
  MixedContamination out;
  if (m == 0) return out;

  KeyedRng rng(seed, kStreamSelect);
  std::vector<int> idx = rng.sample_without_replacement(n, m);
  const int base = m / 3;
  const int rem = m % 3;
  const int n_pc = base + (rem > 0 ? 1 : 0);
  const int n_oc = base + (rem > 1 ? 1 : 0);
  out.pc.assign(idx.begin(), idx.begin() + n_pc);
  out.oc.assign(idx.begin() + n_pc, idx.begin() + n_pc + n_oc);
  out.pc_oc.assign(idx.begin() + n_pc + n_oc, idx.end());
  std::sort(out.pc.begin(), out.pc.end());
  std::sort(out.oc.begin(), out.oc.end());
  std::sort(out.pc_oc.begin(), out.pc_oc.end());

  contaminate_indices(data, truth, OutlierKind::kPc, a, b, seed, out.pc);
  contaminate_indices(data, truth, OutlierKind::kOc, a, b, seed, out.oc);
  contaminate_indices(data, truth, OutlierKind::kPcOc, a, b, seed, out.pc_oc);
  return out;
}

double relative_difference(const MatNormalParams& truth, const MatNormalParams& est) {
  if (truth.d_c() != est.d_c() || truth.d_r() != est.d_r())
    throw ShapeError("relative_difference: parameter shapes differ");
  const double nc = truth.sigma_c.squaredNorm();
  const double nr = truth.sigma_r.squaredNorm();
  const double ec = est.sigma_c.squaredNorm();
  const double er = est.sigma_r.squaredNorm();
  const double tc = (truth.sigma_c.cwiseProduct(est.sigma_c)).sum();
  const double tr = (truth.sigma_r.cwiseProduct(est.sigma_r)).sum();
  double num2 = nr * nc - 2.0 * tr * tc + er * ec;
  if (num2 < 0.0) num2 = 0.0;
  return std::sqrt(num2) / std::sqrt(nr * nc);
}

}  // namespace matpca
