#include "confmetric/baselines.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <unordered_set>

#include "confmetric/error.hpp"

namespace confmetric {

MetricModel uniform_model(const FeatureTheory& theory) {
  return MetricModel::diagonal(theory, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(theory.arity())),
                               Provenance{Method::uniform, std::nullopt, std::nullopt, std::nullopt, std::nullopt});
}

namespace {

constexpr std::array<std::string_view, 6> kPlaces = {"lb", "dn", "al", "pa", "vl", "gl"};
constexpr std::array<std::string_view, 7> kManners = {"pl", "af", "fr", "ns", "lt", "rt", "gd"};

template <std::size_t N>
std::string one_hot(const Inventory& inv, std::size_t row, const std::array<std::string_view, N>& block, std::string_view what) {
  std::string found;
  int hits = 0;
  for (auto name : block) {
    const auto col = inv.theory().index_of(name);
    if (!col) throw DataError("PMV needs articulatory column '" + std::string(name) + "'");
    if (inv.features()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(*col)) == 1.0) {
      found = std::string(name);
      ++hits;
    }
  }
  if (hits != 1) {
    throw DataError("phoneme '" + inv.phonemes()[row] + "' has " + std::to_string(hits) + " " + std::string(what) +
                    " features set, expected exactly one");
  }
  return found;
}

}  // namespace

PmvSpec PmvSpec::from_articulatory(const Inventory& inv) {
  const auto vc = inv.theory().index_of("vc");
  if (!vc) throw DataError("PMV needs articulatory column 'vc'");
  PmvSpec spec;
  spec.labels = inv.phonemes();
  for (std::size_t i = 0; i < inv.size(); ++i) {
    spec.place.push_back(one_hot(inv, i, kPlaces, "place"));
    spec.manner.push_back(one_hot(inv, i, kManners, "manner"));
    spec.voiced.push_back(inv.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*vc)) == 1.0);
  }
  return spec;
}

std::size_t PmvSpec::index(std::string_view label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw DataError("phoneme '" + std::string(label) + "' has no place/manner/voicing entry");
  return static_cast<std::size_t>(it - labels.begin());
}

int pmv_similarity(const PmvSpec& spec, std::string_view a, std::string_view b) {
  const std::size_t i = spec.index(a);
  const std::size_t j = spec.index(b);
  return static_cast<int>(spec.place[i] == spec.place[j]) + static_cast<int>(spec.manner[i] == spec.manner[j]) +
         static_cast<int>(spec.voiced[i] == spec.voiced[j]);
}

std::vector<std::string> NaturalClassSet::members(std::size_t c) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (classes[c] >> i & 1U) out.push_back(labels[i]);
  return out;
}

NaturalClassSet enumerate_natural_classes(const Inventory& inv) {
  if (inv.arity() > kMaxNaturalClassFeatures) {
    throw UsageError("natural-class enumeration is limited to " + std::to_string(kMaxNaturalClassFeatures) + " features, got " +
                     std::to_string(inv.arity()));
  }
  if (inv.size() > 64) throw UsageError("natural-class enumeration is limited to 64 phonemes");

  const std::size_t n_p = inv.size();
  const std::uint64_t everyone = n_p == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n_p) - 1;

  // Extending the specifications one feature at a time (ignore it, require 1,
  // require 0) visits exactly the subsets of the full 3^n_f enumeration;
  // deduplicating after each feature keeps the frontier small.
  std::unordered_set<std::uint64_t> current{everyone};
  for (std::size_t k = 0; k < inv.arity(); ++k) {
    std::uint64_t ones = 0;
    for (std::size_t i = 0; i < n_p; ++i)
      if (inv.features()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) == 1.0) ones |= std::uint64_t{1} << i;
    const std::uint64_t zeros = everyone & ~ones;
    std::unordered_set<std::uint64_t> next = current;
    for (std::uint64_t c : current) {
      next.insert(c & ones);
      next.insert(c & zeros);
    }
    current = std::move(next);
  }
  current.erase(0);

  NaturalClassSet out;
  out.labels = inv.phonemes();
  out.classes.assign(current.begin(), current.end());
  auto member_key = [](std::uint64_t c) {
    std::vector<int> idx;
    for (int i = 0; i < 64; ++i)
      if (c >> i & 1U) idx.push_back(i);
    return idx;
  };
  std::sort(out.classes.begin(), out.classes.end(), [&](std::uint64_t a, std::uint64_t b) {
    const int pa = std::popcount(a);
    const int pb = std::popcount(b);
    if (pa != pb) return pa > pb;
    return member_key(a) < member_key(b);
  });
  return out;
}

double frisch_similarity(const NaturalClassSet& ncs, std::size_t a, std::size_t b) {
  if (a >= ncs.labels.size() || b >= ncs.labels.size()) throw UsageError("phoneme index out of range");
  const std::uint64_t ma = std::uint64_t{1} << a;
  const std::uint64_t mb = std::uint64_t{1} << b;
  std::size_t shared = 0;
  std::size_t non_shared = 0;
  for (std::uint64_t c : ncs.classes) {
    const bool ha = (c & ma) != 0;
    const bool hb = (c & mb) != 0;
    if (ha && hb) {
      ++shared;
    } else if (ha != hb) {
      ++non_shared;
    }
  }
  if (shared + non_shared == 0) throw DataError("phoneme belongs to no natural class");
  return static_cast<double>(shared) / static_cast<double>(shared + non_shared);
}

double frisch_similarity(const NaturalClassSet& ncs, std::string_view a, std::string_view b) {
  auto find = [&](std::string_view l) {
    auto it = std::find(ncs.labels.begin(), ncs.labels.end(), l);
    if (it == ncs.labels.end()) throw DataError("phoneme '" + std::string(l) + "' is not in the natural-class inventory");
    return static_cast<std::size_t>(it - ncs.labels.begin());
  };
  return frisch_similarity(ncs, find(a), find(b));
}

DistanceMatrix baseline_distances(Method method, const Inventory& inv) {
  switch (method) {
    case Method::uniform: return model_distances(uniform_model(inv.theory()), inv);
    case Method::pmv: {
      const PmvSpec spec = PmvSpec::from_articulatory(inv);
      return DistanceMatrix::from_pairs(inv.phonemes(), [&](std::size_t i, std::size_t j) {
        return -static_cast<double>(pmv_similarity(spec, spec.labels[i], spec.labels[j]));
      });
    }
    case Method::frisch: {
      const NaturalClassSet ncs = enumerate_natural_classes(inv);
      return DistanceMatrix::from_pairs(inv.phonemes(), [&](std::size_t i, std::size_t j) { return -frisch_similarity(ncs, i, j); });
    }
    default: break;
  }
  throw UsageError(std::string(to_string(method)) + " is not a baseline method");
}

}  // namespace confmetric
