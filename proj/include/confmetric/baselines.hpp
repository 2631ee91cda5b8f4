#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "confmetric/distances.hpp"
#include "confmetric/inventory.hpp"
#include "confmetric/metric.hpp"

namespace confmetric {

/// Diagonal metric with every weight 1 (Hamming distance on binary features).
MetricModel uniform_model(const FeatureTheory& theory);

/// Place, manner and voicing of each phoneme.
struct PmvSpec {
  std::vector<std::string> labels;
  std::vector<std::string> place;
  std::vector<std::string> manner;
  std::vector<bool> voiced;

  /// Reads the one-hot place (lb dn al pa vl gl) and manner
  /// (pl af fr ns lt rt gd) blocks and the vc column. Throws DataError when a
  /// column is missing or a phoneme lacks exactly one place and one manner.
  static PmvSpec from_articulatory(const Inventory& inv);

  std::size_t index(std::string_view label) const;
};

/// Number of agreeing dimensions among place, manner and voicing (0..3).
int pmv_similarity(const PmvSpec& spec, std::string_view a, std::string_view b);

/// Distinct phoneme subsets picked out by conjunctions of feature values,
/// each stored as a bitmask over the inventory order.
struct NaturalClassSet {
  std::vector<std::string> labels;
  std::vector<std::uint64_t> classes;

  std::size_t size() const { return classes.size(); }
  /// Members of class `c` in inventory order.
  std::vector<std::string> members(std::size_t c) const;
};

inline constexpr std::size_t kMaxNaturalClassFeatures = 20;

/// Every non-empty subset selected by some specification that requires 1,
/// requires 0 or ignores each feature. Subsets are deduplicated and sorted
/// by decreasing size, then by member indices. Throws UsageError above
/// kMaxNaturalClassFeatures features or 64 phonemes.
NaturalClassSet enumerate_natural_classes(const Inventory& inv);

/// shared / (shared + non-shared) natural classes.
double frisch_similarity(const NaturalClassSet& ncs, std::size_t a, std::size_t b);
double frisch_similarity(const NaturalClassSet& ncs, std::string_view a, std::string_view b);

/// Distance-oriented score matrix for a baseline: Hamming distance for
/// uniform, negated similarity for pmv and frisch (rank order is all that
/// evaluation uses). pmv requires the articulatory feature columns.
DistanceMatrix baseline_distances(Method method, const Inventory& inv);

}  // namespace confmetric
