#include "confmetric/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "confmetric/csv.hpp"
#include "confmetric/error.hpp"
#include "confmetric/inventory.hpp"
#include "confmetric/spectral.hpp"

namespace confmetric {

Embedding classical_mds(const DistanceMatrix& dm, int dims) {
  const auto n = static_cast<Eigen::Index>(dm.size());
  if (dims < 1 || dims > n - 1) {
    throw UsageError("embedding dimension must be between 1 and " + std::to_string(n - 1) + ", got " + std::to_string(dims));
  }
  const Eigen::MatrixXd d = dm.dense();
  const Eigen::MatrixXd d2 = d.cwiseProduct(d);
  const Eigen::MatrixXd j = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd b = -0.5 * j * d2 * j;
  b = 0.5 * (b + b.transpose());

  const Spectrum s = symmetric_eigendecompose(b);
  Embedding out;
  out.labels = dm.labels();
  out.coords.resize(n, dims);
  double kept = 0.0;
  double positive = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) positive += std::max(0.0, s.eigenvalues(k));
  for (Eigen::Index k = 0; k < dims; ++k) {
    const double lambda = std::max(0.0, s.eigenvalues(k));
    kept += lambda;
    Eigen::VectorXd col = s.eigenvectors.col(k) * std::sqrt(lambda);
    col.array() -= col.mean();
    Eigen::Index arg = 0;
    for (Eigen::Index i = 1; i < n; ++i)
      if (std::abs(col(i)) > std::abs(col(arg))) arg = i;
    if (col(arg) < 0.0) col = -col;
    out.coords.col(k) = col;
  }
  out.eigenvalue_share = positive > 0.0 ? std::clamp(kept / positive, 0.0, 1.0) : 0.0;

  double resid = 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index k = i + 1; k < n; ++k) {
      const double e = (out.coords.row(i) - out.coords.row(k)).norm();
      resid += (e - d(i, k)) * (e - d(i, k));
      total += d(i, k) * d(i, k);
    }
  }
  out.stress = total > 0.0 ? std::sqrt(resid / total) : 0.0;
  return out;
}

std::string embedding_csv(const Embedding& e) {
  std::string out = "label";
  static constexpr const char* kAxes[] = {"x", "y", "z"};
  for (Eigen::Index k = 0; k < e.coords.cols(); ++k) {
    out += ',';
    out += k < 3 ? std::string(kAxes[k]) : "dim" + std::to_string(k + 1);
  }
  out += '\n';
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    out += csv::escape(e.labels[i]);
    for (Eigen::Index k = 0; k < e.coords.cols(); ++k) out += ',' + csv::format_double(e.coords(static_cast<Eigen::Index>(i), k));
    out += '\n';
  }
  return out;
}

Ellipse enclosing_ellipse(const Eigen::MatrixX2d& xy, double pad, double tolerance) {
  if (xy.rows() == 0) throw UsageError("cannot enclose an empty point set");
  constexpr int kRing = 16;
  const Eigen::Index m = xy.rows() * (pad > 0.0 ? kRing : 1);
  Eigen::MatrixXd p(2, m);
  Eigen::Index c = 0;
  for (Eigen::Index i = 0; i < xy.rows(); ++i) {
    if (pad > 0.0) {
      for (int r = 0; r < kRing; ++r) {
        const double t = 2.0 * M_PI * r / kRing;
        p.col(c++) = xy.row(i).transpose() + pad * Eigen::Vector2d(std::cos(t), std::sin(t));
      }
    } else {
      p.col(c++) = xy.row(i).transpose();
    }
  }

  Eigen::MatrixXd q(3, m);
  q.topRows(2) = p;
  q.row(2).setOnes();
  Eigen::VectorXd u = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  constexpr double d = 2.0;
  for (int iter = 0; iter < 100000; ++iter) {
    const Eigen::Matrix3d x = q * u.asDiagonal() * q.transpose();
    const Eigen::Matrix3d xi = x.inverse();
    Eigen::Index j = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index k = 0; k < m; ++k) {
      const double mk = q.col(k).dot(xi * q.col(k));
      if (mk > best) {
        best = mk;
        j = k;
      }
    }
    const double step = (best - d - 1.0) / ((d + 1.0) * (best - 1.0));
    Eigen::VectorXd next = (1.0 - step) * u;
    next(j) += step;
    const double change = (next - u).norm();
    u = next;
    if (change < tolerance) break;
  }
  Ellipse e;
  e.center = p * u;
  const Eigen::Matrix2d cov = p * u.asDiagonal() * p.transpose() - e.center * e.center.transpose();
  e.shape = cov.inverse() / d;
  return e;
}

std::string_view to_string(Overlay o) {
  switch (o) {
    case Overlay::voiced: return "voiced";
    case Overlay::nasal: return "nasal";
    case Overlay::strident: return "strident";
    case Overlay::approximant: return "approximant";
  }
  return "?";
}

Overlay parse_overlay(std::string_view name) {
  for (Overlay o : {Overlay::voiced, Overlay::nasal, Overlay::strident, Overlay::approximant})
    if (to_string(o) == name) return o;
  throw UsageError("unknown overlay '" + std::string(name) + "' (expected voiced, nasal, strident or approximant)");
}

std::vector<std::string> overlay_members(Overlay o, const std::vector<std::string>& labels) {
  const bool phonological = o == Overlay::strident;
  const Inventory table = bundled_table(phonological ? TheoryId::phonological : TheoryId::articulatory);
  auto has = [&](std::size_t row, std::string_view f) {
    return table.features()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(*table.theory().index_of(f))) == 1.0;
  };
  std::vector<std::string> out;
  for (const auto& l : labels) {
    const auto row = table.find(l);
    if (!row) continue;
    bool member = false;
    switch (o) {
      case Overlay::voiced: member = has(*row, "vc"); break;
      case Overlay::nasal: member = has(*row, "ns"); break;
      case Overlay::strident: member = has(*row, "st") && has(*row, "ds"); break;
      case Overlay::approximant: member = has(*row, "lt") || has(*row, "rt") || has(*row, "gd"); break;
    }
    if (member) out.push_back(l);
  }
  return out;
}

namespace {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

struct Style {
  const char* stroke;
  const char* dash;
};

Style overlay_style(Overlay o) {
  switch (o) {
    case Overlay::voiced: return {"#000000", "6 4"};
    case Overlay::nasal: return {"#d62728", ""};
    case Overlay::strident: return {"#2ca02c", "8 3 2 3"};
    case Overlay::approximant: return {"#d4a017", "2 3"};
  }
  return {"#000000", ""};
}

constexpr int kEllipseSegments = 96;

}  // namespace

std::string render_svg(const ScatterPlot& plot) {
  constexpr double kWidth = 640.0;
  constexpr double kHeight = 640.0;
  constexpr double kMargin = 60.0;

  // Data bounds cover points and ellipses.
  double x0 = std::numeric_limits<double>::infinity();
  double x1 = -x0;
  double y0 = x0;
  double y1 = -x0;
  auto grow = [&](double x, double y) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y0 = std::min(y0, y);
    y1 = std::max(y1, y);
  };
  std::vector<std::vector<Eigen::Vector2d>> outlines;
  for (const auto& pe : plot.ellipses) {
    const Eigen::Matrix2d l = Eigen::Matrix2d(pe.ellipse.shape.inverse()).llt().matrixL();
    std::vector<Eigen::Vector2d> pts;
    for (int s = 0; s <= kEllipseSegments; ++s) {
      const double t = 2.0 * M_PI * s / kEllipseSegments;
      pts.push_back(pe.ellipse.center + l * Eigen::Vector2d(std::cos(t), std::sin(t)));
      grow(pts.back().x(), pts.back().y());
    }
    outlines.push_back(std::move(pts));
  }
  for (const auto& p : plot.points) grow(p.x, p.y);
  if (!std::isfinite(x0)) {
    x0 = y0 = -1.0;
    x1 = y1 = 1.0;
  }
  if (plot.identity_line) {
    x0 = y0 = std::min(x0, y0);
    x1 = y1 = std::max(x1, y1);
  }
  if (x1 - x0 <= 0.0) {
    x0 -= 1.0;
    x1 += 1.0;
  }
  if (y1 - y0 <= 0.0) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double padx = 0.05 * (x1 - x0);
  const double pady = 0.05 * (y1 - y0);
  x0 -= padx;
  x1 += padx;
  y0 -= pady;
  y1 += pady;

  double sx = (kWidth - 2 * kMargin) / (x1 - x0);
  double sy = (kHeight - 2 * kMargin) / (y1 - y0);
  if (plot.equal_aspect) sx = sy = std::min(sx, sy);
  auto px = [&](double x) { return kMargin + (x - x0) * sx; };
  auto py = [&](double y) { return kHeight - kMargin - (y - y0) * sy; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\" viewBox=\"0 0 "
      << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  if (!plot.title.empty())
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(plot.title)
        << "</text>\n";
  if (!plot.x_label.empty())
    svg << "<text x=\"" << kWidth / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\" font-size=\"13\">"
        << xml_escape(plot.x_label) << "</text>\n";
  if (!plot.y_label.empty())
    svg << "<text x=\"18\" y=\"" << kHeight / 2 << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
        << kHeight / 2 << ")\">" << xml_escape(plot.y_label) << "</text>\n";
  svg << "<rect x=\"" << kMargin << "\" y=\"" << kMargin << "\" width=\"" << kWidth - 2 * kMargin << "\" height=\""
      << kHeight - 2 * kMargin << "\" fill=\"none\" stroke=\"#999999\"/>\n";
  if (plot.identity_line) {
    const double lo = std::max(x0, y0);
    const double hi = std::min(x1, y1);
    svg << "<line class=\"identity\" x1=\"" << num(px(lo)) << "\" y1=\"" << num(py(lo)) << "\" x2=\"" << num(px(hi))
        << "\" y2=\"" << num(py(hi)) << "\" stroke=\"#888888\" stroke-dasharray=\"4 4\"/>\n";
  }
  for (std::size_t e = 0; e < plot.ellipses.size(); ++e) {
    const auto& pe = plot.ellipses[e];
    svg << "<path class=\"overlay\" data-group=\"" << xml_escape(pe.name) << "\" d=\"";
    for (std::size_t s = 0; s < outlines[e].size(); ++s)
      svg << (s == 0 ? "M" : " L") << num(px(outlines[e][s].x())) << ' ' << num(py(outlines[e][s].y()));
    svg << " Z\" fill=\"none\" stroke=\"" << pe.stroke << "\" stroke-width=\"2\"";
    if (!pe.dasharray.empty()) svg << " stroke-dasharray=\"" << pe.dasharray << "\"";
    svg << "/>\n";
  }
  for (const auto& p : plot.points) {
    svg << "<circle cx=\"" << num(px(p.x)) << "\" cy=\"" << num(py(p.y)) << "\" r=\"3\" fill=\"#1f77b4\"/>";
    svg << "<text x=\"" << num(px(p.x) + 5) << "\" y=\"" << num(py(p.y) - 5) << "\" font-size=\"14\">" << xml_escape(p.label)
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

ScatterPlot embedding_plot(const Embedding& e, const std::vector<Overlay>& overlays, std::string title) {
  if (e.coords.cols() < 2) throw UsageError("plotting needs a 2-D embedding");
  ScatterPlot plot;
  plot.title = std::move(title);
  plot.x_label = "dimension 1";
  plot.y_label = "dimension 2";
  plot.equal_aspect = true;
  for (std::size_t i = 0; i < e.labels.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    plot.points.push_back({e.labels[i], e.coords(r, 0), e.coords(r, 1)});
  }
  // Pad members by a small fraction of the layout so singletons and pairs
  // still get a visible oval.
  const double span = std::max((e.coords.col(0).maxCoeff() - e.coords.col(0).minCoeff()),
                               (e.coords.col(1).maxCoeff() - e.coords.col(1).minCoeff()));
  const double pad = span > 0.0 ? 0.04 * span : 0.1;
  for (Overlay o : overlays) {
    const auto members = overlay_members(o, e.labels);
    if (members.empty()) continue;
    Eigen::MatrixX2d xy(static_cast<Eigen::Index>(members.size()), 2);
    for (std::size_t m = 0; m < members.size(); ++m) {
      const auto idx = static_cast<Eigen::Index>(std::find(e.labels.begin(), e.labels.end(), members[m]) - e.labels.begin());
      xy.row(static_cast<Eigen::Index>(m)) = e.coords.row(idx).head<2>();
    }
    const Style st = overlay_style(o);
    plot.ellipses.push_back({std::string(to_string(o)), enclosing_ellipse(xy, pad), st.stroke, st.dash});
  }
  return plot;
}

}  // namespace confmetric
