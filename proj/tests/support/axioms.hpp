#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "confmetric/inventory.hpp"
#include "confmetric/metric.hpp"

namespace testsupport {

/// Empty when the model satisfies nonnegativity, symmetry, d(x,x) = 0 and
/// the sqrt-d triangle inequality over every triple of inventory rows;
/// otherwise a description of the first violation. W is evaluated directly
/// from model.matrix(), not through metric_distance.
inline std::string metric_axiom_violation(const confmetric::MetricModel& model, const confmetric::Inventory& inv,
                                          double tol = 1e-9) {
  const Eigen::MatrixXd w = model.matrix();
  const std::size_t n = inv.size();
  Eigen::MatrixXd d(n, n);
  char buf[200];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const Eigen::VectorXd u = inv.row(i) - inv.row(j);
      d(i, j) = u.dot(w * u);
    }
  }
  const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd x = inv.row(i);
    if (std::abs(model.distance(x, x)) > tol * scale) {
      std::snprintf(buf, sizeof buf, "d(%s,%s) = %g", inv.phonemes()[i].c_str(), inv.phonemes()[i].c_str(), model.distance(x, x));
      return buf;
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (d(i, j) < -tol * scale) {
        std::snprintf(buf, sizeof buf, "d(%s,%s) = %g < 0", inv.phonemes()[i].c_str(), inv.phonemes()[j].c_str(), d(i, j));
        return buf;
      }
      if (std::abs(d(i, j) - d(j, i)) > tol * scale) return "asymmetric at " + inv.phonemes()[i] + "," + inv.phonemes()[j];
    }
  }
  // sqrt amplifies rounding noise near zero
  const double slack = 1e-6 * std::sqrt(scale);
  auto root = [](double v) { return std::sqrt(std::max(0.0, v)); };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      for (std::size_t c = 0; c < n; ++c) {
        if (root(d(a, c)) > root(d(a, b)) + root(d(b, c)) + slack) {
          std::snprintf(buf, sizeof buf, "triangle fails for (%s,%s,%s)", inv.phonemes()[a].c_str(), inv.phonemes()[b].c_str(),
                        inv.phonemes()[c].c_str());
          return buf;
        }
      }
    }
  }
  return {};
}

}  // namespace testsupport
