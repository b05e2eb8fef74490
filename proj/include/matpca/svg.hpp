#pragma once

// Static, self-contained SVG figures: the SD/OD scatter with thresholds,
// eigenvalue scree lines and the cellwise Shapley heat map. Output bytes are
// deterministic for fixed inputs (fixed-precision coordinates, no
// timestamps, no external assets).

#include <string>

#include <Eigen/Dense>

#include "matpca/hrfpca.hpp"

namespace matpca {

std::string soda_plot_svg(const SodaReport& report);

std::string scree_plot_svg(const ScreeData& data);

std::string shapley_heatmap_svg(const Eigen::MatrixXd& phi, long id);

}  // namespace matpca
