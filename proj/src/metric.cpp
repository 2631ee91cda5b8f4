#include "confmetric/metric.hpp"

#include <cmath>
#include <string>

#include "confmetric/error.hpp"
#include "confmetric/spectral.hpp"

namespace confmetric {

std::string_view to_string(MetricKind kind) { return kind == MetricKind::full ? "full" : "diagonal"; }

std::string_view to_string(Method method) {
  switch (method) {
    case Method::ls: return "ls";
    case Method::ls_diag: return "ls-diag";
    case Method::oasis: return "oasis";
    case Method::oasis_diag: return "oasis-diag";
    case Method::uniform: return "uniform";
    case Method::pmv: return "pmv";
    case Method::frisch: return "frisch";
  }
  return "?";
}

Method parse_method(std::string_view name) {
  std::string s(name);
  for (auto& c : s)
    if (c == '_') c = '-';
  for (Method m : {Method::ls, Method::ls_diag, Method::oasis, Method::oasis_diag, Method::uniform, Method::pmv, Method::frisch})
    if (to_string(m) == s) return m;
  throw UsageError("unknown method '" + std::string(name) + "' (expected ls|ls-diag|oasis|oasis-diag|uniform|pmv|frisch)");
}

MetricKind parse_metric_kind(std::string_view name) {
  if (name == "full") return MetricKind::full;
  if (name == "diagonal") return MetricKind::diagonal;
  throw UsageError("unknown metric kind '" + std::string(name) + "'");
}

bool is_learner(Method method) {
  return method == Method::ls || method == Method::ls_diag || method == Method::oasis || method == Method::oasis_diag;
}

MetricKind kind_of(Method method) {
  return (method == Method::ls || method == Method::oasis) ? MetricKind::full : MetricKind::diagonal;
}

MetricModel::MetricModel(FeatureTheory theory, MetricKind kind, std::vector<double> params, Provenance provenance)
    : theory_(std::move(theory)), kind_(kind), params_(std::move(params)), provenance_(provenance) {
  for (double v : params_)
    if (!std::isfinite(v)) throw SolverError("metric weights must be finite");
  if (kind_ == MetricKind::diagonal) {
    psd_certified_ = true;
    for (double v : params_) psd_certified_ = psd_certified_ && v >= -kPsdTolerance;
  } else {
    psd_certified_ = arity() == 0 || min_eigenvalue(matrix()) >= -kPsdTolerance;
  }
}

MetricModel MetricModel::diagonal(FeatureTheory theory, Eigen::VectorXd weights, Provenance provenance) {
  if (static_cast<std::size_t>(weights.size()) != theory.arity()) {
    throw UsageError("diagonal weights have " + std::to_string(weights.size()) + " entries, theory has " +
                     std::to_string(theory.arity()) + " features");
  }
  return MetricModel(std::move(theory), MetricKind::diagonal, {weights.data(), weights.data() + weights.size()}, provenance);
}

MetricModel MetricModel::full(FeatureTheory theory, const Eigen::MatrixXd& w, Provenance provenance) {
  const auto n = static_cast<Eigen::Index>(theory.arity());
  if (w.rows() != n || w.cols() != n) throw UsageError("weight matrix shape does not match the feature theory");
  std::vector<double> upper;
  upper.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = k; l < n; ++l) upper.push_back(w(k, l));
  return MetricModel(std::move(theory), MetricKind::full, std::move(upper), provenance);
}

Eigen::MatrixXd MetricModel::matrix() const {
  const auto n = static_cast<Eigen::Index>(arity());
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  if (kind_ == MetricKind::diagonal) {
    for (Eigen::Index k = 0; k < n; ++k) w(k, k) = params_[static_cast<std::size_t>(k)];
    return w;
  }
  std::size_t idx = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    for (Eigen::Index l = k; l < n; ++l) {
      w(k, l) = params_[idx];
      w(l, k) = params_[idx];
      ++idx;
    }
  }
  return w;
}

Eigen::VectorXd MetricModel::diagonal_weights() const { return matrix().diagonal(); }

Eigen::VectorXd MetricModel::flattened() const {
  if (kind_ == MetricKind::diagonal) return Eigen::Map<const Eigen::VectorXd>(params_.data(), static_cast<Eigen::Index>(params_.size()));
  const Eigen::MatrixXd w = matrix();
  const auto n = w.rows();
  Eigen::VectorXd flat(n * n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index l = 0; l < n; ++l) flat(k * n + l) = w(k, l);
  return flat;
}

double MetricModel::distance(const FeatureVector& a, const FeatureVector& b) const {
  const auto n = static_cast<Eigen::Index>(arity());
  if (a.size() != n || b.size() != n) {
    throw UsageError("feature vectors of length " + std::to_string(a.size()) + " and " + std::to_string(b.size()) +
                     " do not match a metric over " + std::to_string(n) + " features");
  }
  const Eigen::VectorXd u = a - b;
  if (kind_ == MetricKind::diagonal) {
    double d = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) d += params_[static_cast<std::size_t>(k)] * u(k) * u(k);
    return d;
  }
  double d = 0.0;
  std::size_t idx = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    d += params_[idx++] * u(k) * u(k);
    for (Eigen::Index l = k + 1; l < n; ++l) d += 2.0 * params_[idx++] * u(k) * u(l);
  }
  return d;
}

double metric_distance(const MetricModel& model, const FeatureVector& a, const FeatureVector& b) {
  return model.distance(a, b);
}

DistanceMatrix model_distances(const MetricModel& model, const Inventory& inv) {
  if (model.theory().feature_names() != inv.theory().feature_names()) {
    throw DataError("model theory '" + model.theory().name() + "' does not match inventory theory '" + inv.theory().name() + "'");
  }
  return DistanceMatrix::from_pairs(inv.phonemes(), [&](std::size_t i, std::size_t j) { return model.distance(inv.row(i), inv.row(j)); });
}

DesignMatrix build_design_matrix(const Inventory& inv, const DistanceMatrix& dm, MetricKind kind) {
  if (dm.labels() != inv.phonemes()) throw DataError("distance matrix labels do not match the inventory (same labels, same order required)");
  const std::size_t n_p = inv.size();
  const auto n_f = static_cast<Eigen::Index>(inv.arity());
  const auto n_pairs = static_cast<Eigen::Index>(n_p * (n_p - 1) / 2);
  DesignMatrix out{kind, inv.theory(), {}, {}, {}};
  out.rows.resize(n_pairs, kind == MetricKind::full ? n_f * n_f : n_f);
  out.targets.resize(n_pairs);
  out.pairs.reserve(static_cast<std::size_t>(n_pairs));
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < n_p; ++i) {
    for (std::size_t j = i + 1; j < n_p; ++j, ++r) {
      const Eigen::VectorXd u = inv.row(i) - inv.row(j);
      if (kind == MetricKind::full) {
        for (Eigen::Index k = 0; k < n_f; ++k)
          for (Eigen::Index l = 0; l < n_f; ++l) out.rows(r, k * n_f + l) = u(k) * u(l);
      } else {
        out.rows.row(r) = u.cwiseProduct(u).transpose();
      }
      out.pairs.emplace_back(i, j);
      out.targets(r) = dm(i, j);
    }
  }
  return out;
}

}  // namespace confmetric
