#pragma once

#include <Eigen/Dense>
#include <vector>

#include "matpca/errors.hpp"

namespace matpca {

// A sample of n real matrices with a common d_c x d_r shape. d_c indexes the
// column-covariance dimension (matrix rows), d_r the row-covariance
// dimension (matrix columns).
struct MatrixDataset {
  std::vector<Eigen::MatrixXd> samples;
  std::vector<long> ids;  // stable per-sample identifiers, 0-based by default
  int d_c = 0;
  int d_r = 0;

  int n() const { return static_cast<int>(samples.size()); }

  // Throws ShapeError on shape mismatch or non-finite entries.
  void validate() const {
    if (samples.empty() || d_c < 1 || d_r < 1)
      throw ShapeError("dataset must contain at least one matrix with positive dimensions");
    if (ids.size() != samples.size())
      throw ShapeError("dataset ids out of sync with samples");
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const Eigen::MatrixXd& X = samples[i];
      if (X.rows() != d_c || X.cols() != d_r)
        throw ShapeError("sample " + std::to_string(i) + " has shape " +
                         std::to_string(X.rows()) + "x" + std::to_string(X.cols()) +
                         ", expected " + std::to_string(d_c) + "x" + std::to_string(d_r));
      if (!X.allFinite())
        throw ShapeError("sample " + std::to_string(i) + " contains non-finite entries");
    }
  }
};

inline MatrixDataset make_dataset(std::vector<Eigen::MatrixXd> samples) {
  MatrixDataset ds;
  ds.samples = std::move(samples);
  if (!ds.samples.empty()) {
    ds.d_c = static_cast<int>(ds.samples[0].rows());
    ds.d_r = static_cast<int>(ds.samples[0].cols());
  }
  ds.ids.resize(ds.samples.size());
  for (std::size_t i = 0; i < ds.ids.size(); ++i) ds.ids[i] = static_cast<long>(i);
  ds.validate();
  return ds;
}

}  // namespace matpca
