#pragma once

#include <Eigen/Dense>
#include <string>
#include <string_view>
#include <vector>

#include "confmetric/distances.hpp"

namespace confmetric {

struct Embedding {
  std::vector<std::string> labels;
  Eigen::MatrixXd coords;  // n_p x dims, columns centred
  double stress = 0.0;
  double eigenvalue_share = 0.0;
};

/// Classical (Torgerson) scaling: double-centre the squared distances, keep
/// the top `dims` eigenpairs with negative eigenvalues clamped to zero.
/// stress = sqrt(sum (|x_i - x_j| - D_ij)^2 / sum D_ij^2) over i < j;
/// eigenvalue_share = kept eigenvalues / sum of positive eigenvalues.
/// Each coordinate column is flipped so its largest-magnitude entry is
/// positive. Throws UsageError unless 1 <= dims <= n_p - 1.
Embedding classical_mds(const DistanceMatrix& dm, int dims = 2);

std::string embedding_csv(const Embedding& e);

struct Ellipse {
  Eigen::Vector2d center;
  /// Points x inside satisfy (x - c)^T shape (x - c) <= 1.
  Eigen::Matrix2d shape;
};

/// Minimum-volume enclosing ellipse (Khachiyan's algorithm) of the points
/// in `xy` (k x 2), each padded by a circle of radius `pad` so that one or
/// two points still give a proper ellipse. Throws UsageError if empty.
Ellipse enclosing_ellipse(const Eigen::MatrixX2d& xy, double pad, double tolerance = 1e-7);

/// Named phoneme groups drawn over embeddings.
enum class Overlay { voiced, nasal, strident, approximant };
std::string_view to_string(Overlay o);
Overlay parse_overlay(std::string_view name);
/// Members of the group among `labels`, read from the bundled feature
/// tables: voiced = vc, nasal = ns, approximant = lt, rt or gd (articulatory);
/// strident = st and ds (phonological).
std::vector<std::string> overlay_members(Overlay o, const std::vector<std::string>& labels);

struct PlotPoint {
  std::string label;
  double x = 0.0;
  double y = 0.0;
};

struct PlotEllipse {
  std::string name;
  Ellipse ellipse;
  std::string stroke;
  std::string dasharray;  // empty for solid
};

struct ScatterPlot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotPoint> points;
  std::vector<PlotEllipse> ellipses;
  bool identity_line = false;  // draw y = x
  bool equal_aspect = false;
};

std::string render_svg(const ScatterPlot& plot);

/// Scatter of the first two embedding dimensions with the requested group
/// ellipses (groups with no member present are skipped).
ScatterPlot embedding_plot(const Embedding& e, const std::vector<Overlay>& overlays, std::string title);

}  // namespace confmetric
