#include "svg.hpp"

#include <algorithm>
#include <cstdio>

#include "dbc/error.hpp"

namespace dbc::cli {

namespace {

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

constexpr const char* kRegion[2] = {"#dce7f5", "#f7ddd5"};
constexpr const char* kPoint[2] = {"#1f5fa8", "#b83227"};
constexpr const char* kOverlay = "#2ca02c";

}  // namespace

std::string render_decision_svg(const ClassifierContract& f, const LabeledDataset& data,
                                const PlotOptions& options) {
  if (data.dimension() != 2)
    throw DataError("plot2d needs a 2-D dataset, got dimension " + std::to_string(data.dimension()));
  if (f.dimension() != 2)
    throw DataError("plot2d needs a 2-D model, got input dimension " + std::to_string(f.dimension()));
  if (options.grid < 2 || options.grid > 2000) throw UsageError("grid must be in [2, 2000]");
  if (options.overlay && options.overlay->rows() != 2)
    throw DataError("overlay examples must be 2-D");

  Eigen::Vector2d lo = data.points().rowwise().minCoeff();
  Eigen::Vector2d hi = data.points().rowwise().maxCoeff();
  if (options.overlay && options.overlay->cols() > 0) {
    lo = lo.cwiseMin(options.overlay->rowwise().minCoeff());
    hi = hi.cwiseMax(options.overlay->rowwise().maxCoeff());
  }
  Eigen::Vector2d span = (hi - lo).cwiseMax(1e-9);
  lo -= 0.06 * span;
  hi += 0.06 * span;
  span = hi - lo;

  const double px = options.size;
  auto to_x = [&](double x) { return (x - lo(0)) / span(0) * px; };
  auto to_y = [&](double y) { return px - (y - lo(1)) / span(1) * px; };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fixed(px) +
         "\" height=\"" + fixed(px) + "\" viewBox=\"0 0 " + fixed(px) + " " + fixed(px) + "\">\n";
  out += "<g id=\"regions\" shape-rendering=\"crispEdges\">\n";

  const auto g = static_cast<Eigen::Index>(options.grid);
  const double cell = px / static_cast<double>(options.grid);
  Eigen::MatrixXd row_centers(2, g);
  for (Eigen::Index r = 0; r < g; ++r) {
    const double y = hi(1) - (static_cast<double>(r) + 0.5) / static_cast<double>(g) * span(1);
    for (Eigen::Index c = 0; c < g; ++c) {
      row_centers(0, c) = lo(0) + (static_cast<double>(c) + 0.5) / static_cast<double>(g) * span(0);
      row_centers(1, c) = y;
    }
    const Eigen::VectorXd values = f.decide_batch(row_centers);
    // Merge runs of equal class into one rect.
    Eigen::Index start = 0;
    for (Eigen::Index c = 1; c <= g; ++c) {
      const int cls = values(start) >= 0.5 ? 1 : 0;
      if (c < g && (values(c) >= 0.5 ? 1 : 0) == cls) continue;
      out += "<rect x=\"" + fixed(static_cast<double>(start) * cell) + "\" y=\"" +
             fixed(static_cast<double>(r) * cell) + "\" width=\"" +
             fixed(static_cast<double>(c - start) * cell) + "\" height=\"" + fixed(cell) +
             "\" fill=\"" + kRegion[cls] + "\"/>\n";
      start = c;
    }
  }
  out += "</g>\n<g id=\"data\" stroke=\"#ffffff\" stroke-width=\"0.5\">\n";
  for (std::size_t i = 0; i < data.count(); ++i) {
    const auto p = data.point(i);
    out += "<circle cx=\"" + fixed(to_x(p(0))) + "\" cy=\"" + fixed(to_y(p(1))) + "\" r=\"" +
           fixed(options.point_radius) + "\" fill=\"" + kPoint[data.label(i)] + "\"/>\n";
  }
  out += "</g>\n";
  if (options.overlay) {
    out += "<g id=\"adversarial\" fill=\"" + std::string(kOverlay) + "\">\n";
    for (Eigen::Index j = 0; j < options.overlay->cols(); ++j)
      out += "<circle cx=\"" + fixed(to_x((*options.overlay)(0, j))) + "\" cy=\"" +
             fixed(to_y((*options.overlay)(1, j))) + "\" r=\"" +
             fixed(options.point_radius * 0.7) + "\"/>\n";
    out += "</g>\n";
  }
  out += "</svg>\n";
  return out;
}

}  // namespace dbc::cli
