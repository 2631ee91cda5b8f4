#include "confmetric/inventory.hpp"

#include <algorithm>
#include <istream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "bundled_data.hpp"
#include "confmetric/csv.hpp"
#include "confmetric/error.hpp"

namespace confmetric {

std::string_view to_string(TheoryId id) {
  switch (id) {
    case TheoryId::articulatory: return "articulatory";
    case TheoryId::phonological: return "phonological";
  }
  return "?";
}

std::string_view to_string(DatasetId id) {
  switch (id) {
    case DatasetId::nm: return "nm";
    case DatasetId::luce: return "luce";
    case DatasetId::hebrew: return "hebrew";
  }
  return "?";
}

TheoryId parse_theory_id(std::string_view name) {
  if (name == "articulatory") return TheoryId::articulatory;
  if (name == "phonological") return TheoryId::phonological;
  throw UsageError("unknown feature theory '" + std::string(name) + "' (expected articulatory|phonological)");
}

DatasetId parse_dataset_id(std::string_view name) {
  if (name == "nm") return DatasetId::nm;
  if (name == "luce") return DatasetId::luce;
  if (name == "hebrew") return DatasetId::hebrew;
  throw UsageError("unknown dataset '" + std::string(name) + "' (expected nm|luce|hebrew)");
}

FeatureTheory::FeatureTheory(std::string name, std::vector<std::string> feature_names)
    : name_(std::move(name)), feature_names_(std::move(feature_names)) {
  std::unordered_set<std::string> seen;
  for (const auto& f : feature_names_) {
    if (f.empty()) throw DataError("feature theory '" + name_ + "': empty feature name");
    if (!seen.insert(f).second) throw DataError("feature theory '" + name_ + "': duplicate feature '" + f + "'");
  }
}

std::optional<std::size_t> FeatureTheory::index_of(std::string_view feature) const {
  auto it = std::find(feature_names_.begin(), feature_names_.end(), feature);
  if (it == feature_names_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - feature_names_.begin());
}

Inventory::Inventory(Unchecked, std::vector<std::string> phonemes, FeatureTheory theory, Eigen::MatrixXd features)
    : phonemes_(std::move(phonemes)), theory_(std::move(theory)), features_(std::move(features)) {
  if (phonemes_.size() < 2) throw DataError("inventory needs at least two phonemes");
  if (static_cast<std::size_t>(features_.rows()) != phonemes_.size() ||
      static_cast<std::size_t>(features_.cols()) != theory_.arity()) {
    throw DataError("inventory feature matrix is " + std::to_string(features_.rows()) + "x" +
                    std::to_string(features_.cols()) + ", expected " + std::to_string(phonemes_.size()) + "x" +
                    std::to_string(theory_.arity()));
  }
  std::unordered_set<std::string> seen;
  for (const auto& p : phonemes_) {
    if (p.empty()) throw DataError("empty phoneme label");
    if (!seen.insert(p).second) throw DataError("duplicate phoneme label '" + p + "'");
  }
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    for (Eigen::Index k = 0; k < features_.cols(); ++k) {
      const double v = features_(i, k);
      if (v != 0.0 && v != 1.0) {
        throw DataError("phoneme '" + phonemes_[static_cast<std::size_t>(i)] + "', feature '" +
                        theory_.feature_names()[static_cast<std::size_t>(k)] + "': value is not binary");
      }
    }
  }
}

Inventory::Inventory(std::vector<std::string> phonemes, FeatureTheory theory, Eigen::MatrixXd features)
    : Inventory(Unchecked{}, std::move(phonemes), std::move(theory), std::move(features)) {
  for (Eigen::Index i = 0; i < features_.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < features_.rows(); ++j) {
      if (features_.row(i) == features_.row(j)) {
        throw DataError("duplicate feature vector: phonemes '" + phonemes_[static_cast<std::size_t>(i)] + "' and '" +
                        phonemes_[static_cast<std::size_t>(j)] + "'");
      }
    }
  }
}

std::optional<std::size_t> Inventory::find(std::string_view label) const {
  auto it = std::find(phonemes_.begin(), phonemes_.end(), label);
  if (it == phonemes_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - phonemes_.begin());
}

std::size_t Inventory::index(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw DataError("phoneme '" + std::string(label) + "' is not in the inventory");
}

bool Inventory::has_distinct_rows() const {
  for (Eigen::Index i = 0; i < features_.rows(); ++i)
    for (Eigen::Index j = i + 1; j < features_.rows(); ++j)
      if (features_.row(i) == features_.row(j)) return false;
  return true;
}

Inventory Inventory::select(std::span<const std::string> labels) const {
  Eigen::MatrixXd sub(static_cast<Eigen::Index>(labels.size()), features_.cols());
  for (std::size_t r = 0; r < labels.size(); ++r) sub.row(static_cast<Eigen::Index>(r)) = features_.row(static_cast<Eigen::Index>(index(labels[r])));
  return Inventory(Unchecked{}, std::vector<std::string>(labels.begin(), labels.end()), theory_, std::move(sub));
}

bool Inventory::operator==(const Inventory& other) const {
  return phonemes_ == other.phonemes_ && theory_ == other.theory_ && features_ == other.features_;
}

FeatureTheory bundled_theory(TheoryId theory) {
  std::vector<std::string> names;
  if (theory == TheoryId::articulatory) {
    names.assign(bundled::kArticulatoryFeatures.begin(), bundled::kArticulatoryFeatures.end());
  } else {
    names.assign(bundled::kPhonologicalFeatures.begin(), bundled::kPhonologicalFeatures.end());
  }
  return FeatureTheory(std::string(to_string(theory)), std::move(names));
}

namespace {

Inventory bundled_rows(TheoryId theory, std::optional<char> dataset_marker) {
  FeatureTheory ft = bundled_theory(theory);
  std::vector<std::string> labels;
  std::vector<std::string_view> bits;
  for (const auto& row : bundled::kFeatureTable) {
    if (dataset_marker && row.datasets.find(*dataset_marker) == std::string_view::npos) continue;
    labels.emplace_back(row.label);
    bits.push_back(theory == TheoryId::articulatory ? row.articulatory : row.phonological);
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(ft.arity()));
  for (std::size_t i = 0; i < bits.size(); ++i)
    for (std::size_t k = 0; k < ft.arity(); ++k)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = bits[i][k] == '1' ? 1.0 : 0.0;
  return Inventory(std::move(labels), std::move(ft), std::move(m));
}

}  // namespace

Inventory bundled_table(TheoryId theory) { return bundled_rows(theory, std::nullopt); }

Inventory load_inventory(TheoryId theory, DatasetId dataset) {
  char marker = 'H';
  if (dataset == DatasetId::nm) marker = 'N';
  if (dataset == DatasetId::luce) marker = 'L';
  return bundled_rows(theory, marker);
}

Inventory parse_feature_table(std::istream& in, std::string theory_name) {
  const auto rows = csv::read(in);
  if (rows.empty()) throw DataError("feature table is empty");
  const auto& header = rows.front();
  if (header.cells.size() < 2) throw DataError("line " + std::to_string(header.line) + ": header needs at least one feature column");
  std::vector<std::string> features(header.cells.begin() + 1, header.cells.end());
  FeatureTheory theory(std::move(theory_name), std::move(features));

  const auto n_f = theory.arity();
  std::vector<std::string> labels;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size() - 1), static_cast<Eigen::Index>(n_f));
  std::set<std::string> seen_labels;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "line " + std::to_string(row.line);
    if (row.cells.size() != n_f + 1) {
      throw DataError(where + ": expected " + std::to_string(n_f + 1) + " cells, found " + std::to_string(row.cells.size()));
    }
    if (row.cells[0].empty()) throw DataError(where + ": empty phoneme label");
    if (!seen_labels.insert(row.cells[0]).second) throw DataError(where + ": duplicate phoneme label '" + row.cells[0] + "'");
    labels.push_back(row.cells[0]);
    for (std::size_t k = 0; k < n_f; ++k) {
      const auto& c = row.cells[k + 1];
      double v = 0.0;
      if (c == "+" || c == "1") {
        v = 1.0;
      } else if (c == "-" || c == "0" || c == "\xE2\x88\x92") {  // U+2212 minus sign
        v = 0.0;
      } else {
        throw DataError(where + ", column " + std::to_string(k + 2) + " (" + theory.feature_names()[k] +
                        "): non-binary cell '" + c + "'");
      }
      m(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(k)) = v;
    }
    for (std::size_t prev = 0; prev + 1 < r; ++prev) {
      if (m.row(static_cast<Eigen::Index>(prev)) == m.row(static_cast<Eigen::Index>(r - 1))) {
        throw DataError(where + ": duplicate feature vector ('" + labels.back() + "' equals '" + labels[prev] + "')");
      }
    }
  }
  return Inventory(std::move(labels), std::move(theory), std::move(m));
}

Inventory parse_feature_table(std::string_view text, std::string theory_name) {
  std::istringstream in{std::string(text)};
  return parse_feature_table(in, std::move(theory_name));
}

std::string serialize_feature_table(const Inventory& inv) {
  std::ostringstream out;
  out << "phoneme";
  for (const auto& f : inv.theory().feature_names()) out << ',' << csv::escape(f);
  out << '\n';
  for (std::size_t i = 0; i < inv.size(); ++i) {
    out << csv::escape(inv.phonemes()[i]);
    for (std::size_t k = 0; k < inv.arity(); ++k)
      out << ',' << (inv.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) == 1.0 ? '+' : '-');
    out << '\n';
  }
  return out.str();
}

Inventory drop_feature(const Inventory& inv, std::string_view feature_name) {
  const auto col = inv.theory().index_of(feature_name);
  if (!col) throw DataError("unknown feature '" + std::string(feature_name) + "' in theory '" + inv.theory().name() + "'");
  std::vector<std::string> names = inv.theory().feature_names();
  names.erase(names.begin() + static_cast<std::ptrdiff_t>(*col));
  const auto c = static_cast<Eigen::Index>(*col);
  const Eigen::Index n_f = inv.features().cols();
  Eigen::MatrixXd m(inv.features().rows(), n_f - 1);
  m.leftCols(c) = inv.features().leftCols(c);
  m.rightCols(n_f - 1 - c) = inv.features().rightCols(n_f - 1 - c);
  return Inventory(Inventory::Unchecked{}, inv.phonemes(), FeatureTheory(inv.theory().name(), std::move(names)), std::move(m));
}

}  // namespace confmetric
