#pragma once

#include <cstddef>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dbc/classifier.hpp"
#include "dbc/dataset.hpp"

namespace dbc::cli {

struct PlotOptions {
  std::size_t grid = 160;    // raster cells per side
  double size = 560.0;       // canvas width and height in px
  double point_radius = 3.0;
  std::optional<Eigen::MatrixXd> overlay;  // 2 x m adversarial examples
};

/// Static SVG 1.1: decision regions of f thresholded at 0.5, data points colored by
/// class, and the overlay in green. Requires a 2-D dataset and classifier.
std::string render_decision_svg(const ClassifierContract& f, const LabeledDataset& data,
                                const PlotOptions& options);

}  // namespace dbc::cli
