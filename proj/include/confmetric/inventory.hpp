#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace confmetric {

enum class TheoryId { articulatory, phonological };
enum class DatasetId { nm, luce, hebrew };

std::string_view to_string(TheoryId id);
std::string_view to_string(DatasetId id);
TheoryId parse_theory_id(std::string_view name);
DatasetId parse_dataset_id(std::string_view name);

/// A named, ordered set of binary features.
class FeatureTheory {
public:
  FeatureTheory(std::string name, std::vector<std::string> feature_names);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& feature_names() const { return feature_names_; }
  std::size_t arity() const { return feature_names_.size(); }
  std::optional<std::size_t> index_of(std::string_view feature) const;

  bool operator==(const FeatureTheory&) const = default;

private:
  std::string name_;
  std::vector<std::string> feature_names_;
};

/// Binary feature vector of one phoneme; entries are exactly 0.0 or 1.0.
using FeatureVector = Eigen::VectorXd;

/// Phoneme labels with their binary feature matrix (one row per phoneme).
///
/// The public constructor enforces every invariant: at least two phonemes,
/// unique labels, binary entries and pairwise distinct rows. Inventories
/// derived by drop_feature() or select() keep the first three but may contain
/// coinciding rows; has_distinct_rows() reports which case applies.
class Inventory {
public:
  Inventory(std::vector<std::string> phonemes, FeatureTheory theory, Eigen::MatrixXd features);

  const std::vector<std::string>& phonemes() const { return phonemes_; }
  const FeatureTheory& theory() const { return theory_; }
  const Eigen::MatrixXd& features() const { return features_; }

  std::size_t size() const { return phonemes_.size(); }
  std::size_t arity() const { return theory_.arity(); }

  FeatureVector row(std::size_t i) const { return features_.row(static_cast<Eigen::Index>(i)).transpose(); }
  FeatureVector row(std::string_view label) const { return row(index(label)); }

  std::optional<std::size_t> find(std::string_view label) const;
  /// Index of `label`; throws DataError when absent.
  std::size_t index(std::string_view label) const;
  bool has_distinct_rows() const;

  /// Sub-inventory holding `labels` in the given order.
  Inventory select(std::span<const std::string> labels) const;

  bool operator==(const Inventory& other) const;

private:
  struct Unchecked {};
  Inventory(Unchecked, std::vector<std::string> phonemes, FeatureTheory theory, Eigen::MatrixXd features);

  friend Inventory drop_feature(const Inventory& inv, std::string_view feature_name);

  std::vector<std::string> phonemes_;
  FeatureTheory theory_;
  Eigen::MatrixXd features_;
};

/// Articulatory or phonological theory with feature columns in table order.
FeatureTheory bundled_theory(TheoryId theory);

/// Every phoneme of the bundled feature table under one theory.
Inventory bundled_table(TheoryId theory);

/// Bundled inventory restricted to the phonemes tested in one dataset.
Inventory load_inventory(TheoryId theory, DatasetId dataset);

/// Reads "phoneme,<feature...>" CSV with cells in {+,-,1,0}.
Inventory parse_feature_table(std::istream& in, std::string theory_name = "custom");
Inventory parse_feature_table(std::string_view text, std::string theory_name = "custom");
std::string serialize_feature_table(const Inventory& inv);

/// Removes one feature column. Rows may coincide afterwards.
Inventory drop_feature(const Inventory& inv, std::string_view feature_name);

}  // namespace confmetric
