#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "confmetric/distances.hpp"
#include "confmetric/inventory.hpp"

namespace confmetric {

enum class MetricKind { full, diagonal };

/// Every way of producing phoneme distances: four learners and three
/// theory-driven baselines.
enum class Method { ls, ls_diag, oasis, oasis_diag, uniform, pmv, frisch };

std::string_view to_string(MetricKind kind);
std::string_view to_string(Method method);
/// Accepts both "ls-diag" and "ls_diag" spellings.
Method parse_method(std::string_view name);
MetricKind parse_metric_kind(std::string_view name);
bool is_learner(Method method);
MetricKind kind_of(Method method);

struct Provenance {
  Method method = Method::uniform;
  std::optional<double> lambda;
  std::optional<std::uint64_t> seed;
  std::optional<double> aggressiveness;
  std::optional<std::int64_t> iterations;

  bool operator==(const Provenance&) const = default;
};

/// Quadratic form d(a, b) = (a - b)^T W (a - b) over a feature theory.
///
/// W is held as its upper triangle (full kind) or its diagonal (diagonal
/// kind), so the materialised matrix is symmetric by construction.
/// psd_certified() is computed, never asserted by the caller.
class MetricModel {
public:
  static MetricModel diagonal(FeatureTheory theory, Eigen::VectorXd weights, Provenance provenance);
  /// Reads the upper triangle of `w`.
  static MetricModel full(FeatureTheory theory, const Eigen::MatrixXd& w, Provenance provenance);

  MetricKind kind() const { return kind_; }
  const FeatureTheory& theory() const { return theory_; }
  const Provenance& provenance() const { return provenance_; }
  bool psd_certified() const { return psd_certified_; }
  std::size_t arity() const { return theory_.arity(); }

  Eigen::MatrixXd matrix() const;
  Eigen::VectorXd diagonal_weights() const;
  /// Row-major W (n_f^2 entries) for the full kind, the diagonal for the
  /// diagonal kind; matches the column layout of DesignMatrix.
  Eigen::VectorXd flattened() const;
  /// Stored parameters: upper triangle row by row, or the diagonal.
  const std::vector<double>& parameters() const { return params_; }

  double distance(const FeatureVector& a, const FeatureVector& b) const;

  bool operator==(const MetricModel&) const = default;

private:
  MetricModel(FeatureTheory theory, MetricKind kind, std::vector<double> params, Provenance provenance);

  FeatureTheory theory_;
  MetricKind kind_;
  std::vector<double> params_;
  Provenance provenance_;
  bool psd_certified_ = false;
};

/// (a - b)^T W (a - b); throws UsageError on dimension mismatch.
double metric_distance(const MetricModel& model, const FeatureVector& a, const FeatureVector& b);

/// Model distances between all inventory pairs.
DistanceMatrix model_distances(const MetricModel& model, const Inventory& inv);

/// Least-squares system over phoneme pairs: one row per pair (i < j) in
/// lexicographic order, one column per weight.
struct DesignMatrix {
  MetricKind kind;
  FeatureTheory theory;
  Eigen::MatrixXd rows;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  Eigen::VectorXd targets;
};

/// Full kind: entry (pair, k * n_f + l) = (p_k^i - p_k^j)(p_l^i - p_l^j).
/// Diagonal kind: entry (pair, k) = (p_k^i - p_k^j)^2.
/// Throws DataError when the distance labels differ from the inventory's.
DesignMatrix build_design_matrix(const Inventory& inv, const DistanceMatrix& dm, MetricKind kind);

}  // namespace confmetric
