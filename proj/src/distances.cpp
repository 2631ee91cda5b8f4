#include "confmetric/distances.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <unordered_set>

#include "bundled_data.hpp"
#include "confmetric/csv.hpp"
#include "confmetric/error.hpp"

namespace confmetric {

namespace {

void check_labels(const std::vector<std::string>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw DataError("empty phoneme label");
    if (!seen.insert(l).second) throw DataError("duplicate phoneme label '" + l + "'");
  }
}

std::optional<std::size_t> find_label(const std::vector<std::string>& labels, std::string_view label) {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels.begin());
}

// Parses the header/label frame shared by confusion and distance CSVs and
// hands each numeric cell to `cell(i, j, text, where)`.
template <class CellFn>
std::vector<std::string> parse_square(const std::vector<csv::Row>& rows, std::string_view what, CellFn&& cell) {
  if (rows.empty()) throw DataError(std::string(what) + " CSV is empty");
  const auto& header = rows.front();
  std::vector<std::string> labels(header.cells.begin() + 1, header.cells.end());
  const std::size_t n = labels.size();
  if (n == 0) throw DataError(std::string(what) + " CSV header has no labels");
  if (rows.size() - 1 != n) {
    throw DataError(std::string(what) + " CSV is not square: " + std::to_string(n) + " columns but " +
                    std::to_string(rows.size() - 1) + " rows");
  }
  check_labels(labels);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i + 1];
    const std::string where = "line " + std::to_string(row.line);
    if (row.cells.size() != n + 1) {
      throw DataError(where + ": expected " + std::to_string(n + 1) + " cells, found " + std::to_string(row.cells.size()) +
                      " (matrix is not square)");
    }
    if (row.cells[0] != labels[i]) {
      throw DataError(where + ": row label '" + row.cells[0] + "' does not match header label '" + labels[i] + "'");
    }
    for (std::size_t j = 0; j < n; ++j) cell(i, j, row.cells[j + 1], where + ", column " + labels[j]);
  }
  return labels;
}

}  // namespace

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels, CountMatrix counts)
    : labels_(std::move(labels)), counts_(std::move(counts)) {
  const auto n = static_cast<Eigen::Index>(labels_.size());
  if (n < 2) throw DataError("confusion matrix needs at least two phonemes");
  if (counts_.rows() != n || counts_.cols() != n) throw DataError("confusion matrix is not square");
  check_labels(labels_);
  row_totals_.resize(labels_.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (counts_(i, j) < 0) {
        throw DataError("negative count at (" + labels_[static_cast<std::size_t>(i)] + ", " +
                        labels_[static_cast<std::size_t>(j)] + ")");
      }
    }
    if (counts_(i, i) == 0) throw DataError("zero diagonal count for '" + labels_[static_cast<std::size_t>(i)] + "'");
    row_totals_[static_cast<std::size_t>(i)] = counts_.row(i).sum();
  }
}

std::size_t ConfusionMatrix::index(std::string_view label) const {
  if (auto i = find_label(labels_, label)) return *i;
  throw DataError("phoneme '" + std::string(label) + "' is not in the confusion matrix");
}

CondensedMatrix::CondensedMatrix(std::vector<std::string> labels, std::vector<double> upper, double diagonal)
    : labels_(std::move(labels)), values_(std::move(upper)), diagonal_(diagonal) {
  check_labels(labels_);
  const std::size_t n = labels_.size();
  if (values_.size() != n * (n - 1) / 2) {
    throw DataError("condensed matrix over " + std::to_string(n) + " labels needs " + std::to_string(n * (n - 1) / 2) +
                    " pair values, got " + std::to_string(values_.size()));
  }
}

Eigen::MatrixXd CondensedMatrix::dense() const {
  const auto n = static_cast<Eigen::Index>(size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = (*this)(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return m;
}

std::optional<std::size_t> CondensedMatrix::find(std::string_view label) const { return find_label(labels_, label); }

std::size_t CondensedMatrix::index(std::string_view label) const {
  if (auto i = find(label)) return *i;
  throw DataError("phoneme '" + std::string(label) + "' is not in the matrix");
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> labels, std::vector<double> upper)
    : CondensedMatrix(std::move(labels), std::move(upper), 1.0) {
  for (double v : values_)
    if (!std::isfinite(v) || v < 0.0) throw DataError("similarity values must be finite and nonnegative");
}

DistanceMatrix::DistanceMatrix(std::vector<std::string> labels, std::vector<double> upper)
    : CondensedMatrix(std::move(labels), std::move(upper), 0.0) {
  for (double v : values_)
    if (!std::isfinite(v)) throw DataError("distance matrix has a non-finite entry");
}

DistanceMatrix DistanceMatrix::from_pairs(std::vector<std::string> labels,
                                          const std::function<double(std::size_t, std::size_t)>& value) {
  const std::size_t n = labels.size();
  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) upper.push_back(value(i, j));
  return DistanceMatrix(std::move(labels), std::move(upper));
}

DistanceMatrix DistanceMatrix::from_dense(std::vector<std::string> labels, const Eigen::MatrixXd& m, double tol) {
  const auto n = static_cast<Eigen::Index>(labels.size());
  if (m.rows() != n || m.cols() != n) throw DataError("distance matrix shape does not match its labels");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(m(i, i)) > tol) throw DataError("distance matrix has a nonzero diagonal at '" + labels[static_cast<std::size_t>(i)] + "'");
    for (Eigen::Index j = i + 1; j < n; ++j) {
      if (!(std::abs(m(i, j) - m(j, i)) <= tol)) {
        throw DataError("distance matrix is not symmetric at (" + labels[static_cast<std::size_t>(i)] + ", " +
                        labels[static_cast<std::size_t>(j)] + ")");
      }
    }
  }
  return from_pairs(std::move(labels), [&](std::size_t i, std::size_t j) {
    return m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  });
}

ConfusionMatrix parse_confusion_csv(std::istream& in) {
  const auto rows = csv::read(in);
  CountMatrix counts;
  std::size_t n = rows.empty() ? 0 : rows.front().cells.size() - 1;
  counts.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto labels = parse_square(rows, "confusion", [&](std::size_t i, std::size_t j, const std::string& text, const std::string& where) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw DataError(where + ": count '" + text + "' is not an integer");
    }
    if (v < 0) throw DataError(where + ": negative count " + text);
    if (i == j && v == 0) throw DataError(where + ": zero diagonal count");
    counts(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
  });
  return ConfusionMatrix(std::move(labels), std::move(counts));
}

ConfusionMatrix parse_confusion_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_confusion_csv(in);
}

ConfusionMatrix bundled_confusion(DatasetId dataset) {
  if (dataset != DatasetId::hebrew) {
    throw DataError("no bundled confusion matrix for dataset '" + std::string(to_string(dataset)) +
                    "'; supply it as CSV or place it in CONFMETRIC_DATA_DIR");
  }
  constexpr auto n = static_cast<Eigen::Index>(bundled::kHebrewLabels.size());
  CountMatrix counts(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      counts(i, j) = bundled::kHebrewConfusions[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return ConfusionMatrix({bundled::kHebrewLabels.begin(), bundled::kHebrewLabels.end()}, std::move(counts));
}

SimilarityMatrix shepard_similarity(const ConfusionMatrix& cm, double smoothing) {
  if (!(smoothing >= 0.0) || !std::isfinite(smoothing)) throw UsageError("smoothing must be a finite value >= 0");
  const std::size_t n = cm.size();
  auto proportion = [&](std::size_t i, std::size_t j) {
    return (static_cast<double>(cm.count(i, j)) + smoothing) /
           (static_cast<double>(cm.row_total(i)) + smoothing * static_cast<double>(n));
  };
  std::vector<double> upper;
  upper.reserve(n * (n - 1) / 2);
  std::vector<std::string> zero_pairs;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double s = (proportion(i, j) + proportion(j, i)) / (proportion(i, i) + proportion(j, j));
      if (s == 0.0) zero_pairs.push_back(cm.labels()[i] + "-" + cm.labels()[j]);
      upper.push_back(s);
    }
  }
  if (!zero_pairs.empty()) {
    std::string msg = "zero similarity (no confusions in either direction) for pairs:";
    for (const auto& p : zero_pairs) msg += " " + p;
    msg += "; set a smoothing constant > 0 (e.g. " + csv::format_double(kFallbackSmoothing) + ")";
    throw DataError(msg);
  }
  return SimilarityMatrix(cm.labels(), std::move(upper));
}

DistanceMatrix shepard_distance(const SimilarityMatrix& sm) {
  std::vector<double> upper;
  upper.reserve(sm.pair_count());
  for (double s : sm.packed()) {
    if (!(s > 0.0)) throw DataError("similarity must be positive to take its logarithm");
    upper.push_back(-std::log(s));
  }
  return DistanceMatrix(sm.labels(), std::move(upper));
}

DistanceMatrix restrict(const DistanceMatrix& dm, std::span<const std::string> labels) {
  std::vector<std::size_t> idx;
  idx.reserve(labels.size());
  for (const auto& l : labels) idx.push_back(dm.index(l));
  return DistanceMatrix::from_pairs({labels.begin(), labels.end()},
                                    [&](std::size_t i, std::size_t j) { return dm(idx[i], idx[j]); });
}

std::vector<std::string> shared_labels(std::span<const std::vector<std::string>> label_sets) {
  if (label_sets.empty()) return {};
  std::vector<std::string> out;
  for (const auto& l : label_sets.front()) {
    bool everywhere = true;
    for (const auto& other : label_sets.subspan(1))
      everywhere = everywhere && std::find(other.begin(), other.end(), l) != other.end();
    if (everywhere) out.push_back(l);
  }
  return out;
}

std::string to_square_csv(const CondensedMatrix& m) {
  std::ostringstream out;
  out << "phoneme";
  for (const auto& l : m.labels()) out << ',' << csv::escape(l);
  out << '\n';
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << csv::escape(m.labels()[i]);
    for (std::size_t j = 0; j < m.size(); ++j) out << ',' << csv::format_double(m(i, j));
    out << '\n';
  }
  return out.str();
}

std::string to_long_csv(const DistanceMatrix& dm) {
  std::ostringstream out;
  out << "i,j,distance\n";
  for (std::size_t i = 0; i < dm.size(); ++i)
    for (std::size_t j = i + 1; j < dm.size(); ++j)
      out << csv::escape(dm.labels()[i]) << ',' << csv::escape(dm.labels()[j]) << ',' << csv::format_double(dm(i, j)) << '\n';
  return out.str();
}

namespace {

// "i,j,distance" rows, one per unordered pair; labels in order of appearance.
DistanceMatrix parse_long_distances(const std::vector<csv::Row>& rows) {
  std::vector<std::string> labels;
  std::map<std::string, std::size_t> index;
  auto intern = [&](const std::string& label) {
    auto [it, added] = index.emplace(label, labels.size());
    if (added) labels.push_back(label);
    return it->second;
  };
  std::map<std::pair<std::size_t, std::size_t>, double> values;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    const std::string where = "line " + std::to_string(row.line);
    if (row.cells.size() != 3) throw DataError(where + ": expected 3 cells, got " + std::to_string(row.cells.size()));
    const std::size_t i = intern(row.cells[0]);
    const std::size_t j = intern(row.cells[1]);
    if (i == j) throw DataError(where + ": pair of '" + row.cells[0] + "' with itself");
    const std::string& text = row.cells[2];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw DataError(where + ": '" + text + "' is not a finite number");
    }
    if (!values.emplace(std::minmax(i, j), v).second) {
      throw DataError(where + ": duplicate pair " + row.cells[0] + "-" + row.cells[1]);
    }
  }
  const std::size_t n = labels.size();
  if (values.size() != n * (n - 1) / 2) {
    throw DataError("long distance CSV covers " + std::to_string(values.size()) + " of " + std::to_string(n * (n - 1) / 2) +
                    " pairs");
  }
  return DistanceMatrix::from_pairs(std::move(labels), [&](std::size_t i, std::size_t j) { return values.at({i, j}); });
}

}  // namespace

DistanceMatrix parse_distance_csv(std::istream& in) {
  const auto rows = csv::read(in);
  if (!rows.empty() && rows.front().cells == std::vector<std::string>{"i", "j", "distance"}) return parse_long_distances(rows);
  std::size_t n = rows.empty() ? 0 : rows.front().cells.size() - 1;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  auto labels = parse_square(rows, "distance", [&](std::size_t i, std::size_t j, const std::string& text, const std::string& where) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(v)) {
      throw DataError(where + ": '" + text + "' is not a finite number");
    }
    m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
  });
  return DistanceMatrix::from_dense(std::move(labels), m);
}

DistanceMatrix parse_distance_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_distance_csv(in);
}

}  // namespace confmetric
