#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "confmetric/inventory.hpp"

namespace confmetric {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Square confusion counts: entry (i, j) is how often stimulus i was
/// identified as j.
class ConfusionMatrix {
public:
  /// Validates shape, nonnegative counts and positive diagonal.
  ConfusionMatrix(std::vector<std::string> labels, CountMatrix counts);

  const std::vector<std::string>& labels() const { return labels_; }
  const CountMatrix& counts() const { return counts_; }
  std::int64_t count(std::size_t i, std::size_t j) const {
    return counts_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  std::int64_t row_total(std::size_t i) const { return row_totals_[i]; }
  const std::vector<std::int64_t>& row_totals() const { return row_totals_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t index(std::string_view label) const;

private:
  std::vector<std::string> labels_;
  CountMatrix counts_;
  std::vector<std::int64_t> row_totals_;
};

/// Symmetric matrix over labelled items stored as its strict upper triangle;
/// the diagonal is a constant. Pairs are packed in lexicographic (i, j),
/// i < j order.
class CondensedMatrix {
public:
  const std::vector<std::string>& labels() const { return labels_; }
  std::size_t size() const { return labels_.size(); }
  std::size_t pair_count() const { return values_.size(); }
  double diagonal() const { return diagonal_; }

  double operator()(std::size_t i, std::size_t j) const {
    if (i == j) return diagonal_;
    return i < j ? values_[pair_index(i, j)] : values_[pair_index(j, i)];
  }
  double at(std::string_view a, std::string_view b) const { return (*this)(index(a), index(b)); }

  std::span<const double> packed() const { return values_; }
  Eigen::MatrixXd dense() const;

  std::optional<std::size_t> find(std::string_view label) const;
  std::size_t index(std::string_view label) const;

  std::size_t pair_index(std::size_t i, std::size_t j) const {
    const std::size_t n = labels_.size();
    return i * n - i * (i + 1) / 2 + (j - i - 1);
  }

protected:
  CondensedMatrix(std::vector<std::string> labels, std::vector<double> upper, double diagonal);

  std::vector<std::string> labels_;
  std::vector<double> values_;
  double diagonal_;
};

/// Shepard similarities; diagonal is 1 by convention.
class SimilarityMatrix : public CondensedMatrix {
public:
  SimilarityMatrix(std::vector<std::string> labels, std::vector<double> upper);
};

/// Symmetric, zero-diagonal, finite matrix of distances (or of
/// distance-oriented scores, where larger means less similar).
class DistanceMatrix : public CondensedMatrix {
public:
  DistanceMatrix(std::vector<std::string> labels, std::vector<double> upper);

  static DistanceMatrix from_pairs(std::vector<std::string> labels,
                                   const std::function<double(std::size_t, std::size_t)>& value);
  /// Accepts a square matrix whose asymmetry and diagonal stay within `tol`.
  static DistanceMatrix from_dense(std::vector<std::string> labels, const Eigen::MatrixXd& m, double tol = 1e-9);

  bool operator==(const DistanceMatrix& other) const {
    return labels_ == other.labels_ && values_ == other.values_;
  }
};

/// Smoothing constant suggested when unsmoothed data has zero-similarity pairs.
inline constexpr double kFallbackSmoothing = 0.5;

ConfusionMatrix parse_confusion_csv(std::istream& in);
ConfusionMatrix parse_confusion_csv(std::string_view text);

/// Confusion data shipped with the library. Only the Hebrew dataset is
/// available; the English datasets throw DataError.
ConfusionMatrix bundled_confusion(DatasetId dataset);

/// S_ij = (p_ij + p_ji) / (p_ii + p_jj) with p_ij = (C_ij + a) / (row_i + a * n).
SimilarityMatrix shepard_similarity(const ConfusionMatrix& cm, double smoothing = 0.0);

/// D_ij = -ln S_ij.
DistanceMatrix shepard_distance(const SimilarityMatrix& sm);

/// Principal submatrix in the order of `labels`.
DistanceMatrix restrict(const DistanceMatrix& dm, std::span<const std::string> labels);

/// Labels present in every matrix, in the order of the first.
std::vector<std::string> shared_labels(std::span<const std::vector<std::string>> label_sets);

std::string to_square_csv(const CondensedMatrix& m);
std::string to_long_csv(const DistanceMatrix& dm);
DistanceMatrix parse_distance_csv(std::istream& in);
DistanceMatrix parse_distance_csv(std::string_view text);

}  // namespace confmetric
