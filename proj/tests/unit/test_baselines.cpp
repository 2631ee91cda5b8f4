#include <doctest.h>

#include <set>

#include "axioms.hpp"
#include "confmetric/baselines.hpp"
#include "confmetric/error.hpp"
#include "generators.hpp"
#include "oracles.hpp"

using namespace confmetric;

namespace {

std::set<std::uint64_t> as_set(const NaturalClassSet& s) { return {s.classes.begin(), s.classes.end()}; }

// shared / (shared + non-shared) counted over explicit subsets
double frisch_oracle(const std::set<std::uint64_t>& classes, std::size_t a, std::size_t b) {
  double shared = 0, only = 0;
  for (std::uint64_t c : classes) {
    const bool in_a = c >> a & 1, in_b = c >> b & 1;
    if (in_a && in_b) ++shared;
    else if (in_a || in_b) ++only;
  }
  return shared / (shared + only);
}

}  // namespace

TEST_CASE("uniform model") {
  const Inventory art = bundled_table(TheoryId::articulatory);
  const MetricModel u = uniform_model(art.theory());
  CHECK(u.kind() == MetricKind::diagonal);
  CHECK(u.psd_certified());
  CHECK(u.diagonal_weights() == Eigen::VectorXd::Ones(14));
  CHECK(u.distance(art.row("t"), art.row("m")) == 5.0);
  CHECK(u.distance(art.row("k"), art.row("k")) == 0.0);
  const Inventory phon = bundled_table(TheoryId::phonological);
  CHECK(uniform_model(phon.theory()).distance(phon.row("p"), phon.row("b")) == 1.0);
  CHECK(testsupport::metric_axiom_violation(u, art).empty());
}

TEST_CASE("PMV examples") {
  const PmvSpec spec = PmvSpec::from_articulatory(load_inventory(TheoryId::articulatory, DatasetId::hebrew));
  CHECK(pmv_similarity(spec, "b", "g") == 2);
  CHECK(pmv_similarity(spec, "t", "f") == 1);
  CHECK(pmv_similarity(spec, "t", "m") == 0);
  CHECK(pmv_similarity(spec, "s", "s") == 3);
  CHECK_THROWS_AS(pmv_similarity(spec, "s", "ŋ"), DataError);
  CHECK_THROWS_AS(PmvSpec::from_articulatory(bundled_table(TheoryId::phonological)), DataError);
}

TEST_CASE("PMV is symmetric and 3 exactly for equal triples") {
  const Inventory inv = bundled_table(TheoryId::articulatory);
  const PmvSpec spec = PmvSpec::from_articulatory(inv);
  for (const auto& a : inv.phonemes()) {
    for (const auto& b : inv.phonemes()) {
      const std::size_t i = spec.index(a), j = spec.index(b);
      const bool same = spec.place[i] == spec.place[j] && spec.manner[i] == spec.manner[j] && spec.voiced[i] == spec.voiced[j];
      CHECK(pmv_similarity(spec, a, b) == pmv_similarity(spec, b, a));
      CHECK((pmv_similarity(spec, a, b) == 3) == same);
    }
  }
}

TEST_CASE("natural class examples") {
  const Inventory two({"a", "b"}, testsupport::Gen::theory(1), Eigen::MatrixXd((Eigen::MatrixXd(2, 1) << 1, 0).finished()));
  const NaturalClassSet ncs = enumerate_natural_classes(two);
  CHECK(ncs.size() == 3);
  CHECK(ncs.members(0) == std::vector<std::string>{"a", "b"});
  CHECK(frisch_similarity(ncs, "a", "b") == doctest::Approx(1.0 / 3.0));
  CHECK(frisch_similarity(ncs, "a", "a") == 1.0);
}

TEST_CASE("natural classes match the subset oracle on small inventories") {
  testsupport::Gen gen(83);
  for (int trial = 0; trial < 200; ++trial) {
    const int n_f = gen.integer(1, 5);
    const int n_p = gen.integer(2, std::min(9, 1 << n_f));
    const Inventory inv = gen.inventory(n_p, n_f);
    const NaturalClassSet ncs = enumerate_natural_classes(inv);
    const auto oracle = testsupport::brute_natural_classes(inv.features());
    REQUIRE(as_set(ncs) == oracle);
    CHECK(ncs.size() == oracle.size());
    CHECK(ncs.classes.front() == (std::uint64_t{1} << n_p) - 1);
    for (std::size_t a = 0; a < inv.size(); ++a) {
      for (std::size_t b = 0; b < inv.size(); ++b) {
        const double f = frisch_similarity(ncs, a, b);
        CHECK(f == frisch_oracle(oracle, a, b));
        CHECK(f == frisch_similarity(ncs, b, a));
        CHECK((f == 1.0) == (a == b));
        CHECK(f >= 0.0);
      }
    }
  }
}

TEST_CASE("redundant and permuted columns leave natural classes unchanged") {
  testsupport::Gen gen(89);
  for (int trial = 0; trial < 60; ++trial) {
    const int n_f = gen.integer(1, 5);
    const Inventory inv = gen.inventory(gen.integer(2, std::min(10, 1 << n_f)), n_f);
    Eigen::MatrixXd wider(inv.size(), n_f + 1);
    wider << inv.features(), inv.features().col(gen.integer(0, n_f - 1));
    const Inventory dup(inv.phonemes(), testsupport::Gen::theory(n_f + 1), wider);
    Eigen::MatrixXd flipped = inv.features().rowwise().reverse();
    const Inventory perm(inv.phonemes(), testsupport::Gen::theory(n_f), flipped);
    const auto base = enumerate_natural_classes(inv);
    CHECK(enumerate_natural_classes(dup).classes == base.classes);
    CHECK(enumerate_natural_classes(perm).classes == base.classes);
  }
}

TEST_CASE("natural class bounds") {
  testsupport::Gen gen(97);
  const Inventory wide = gen.inventory(4, 21);
  CHECK_THROWS_AS(enumerate_natural_classes(wide), UsageError);
}

TEST_CASE("baseline score matrices") {
  const Inventory inv = load_inventory(TheoryId::articulatory, DatasetId::hebrew);
  const PmvSpec spec = PmvSpec::from_articulatory(inv);
  const DistanceMatrix pmv = baseline_distances(Method::pmv, inv);
  const DistanceMatrix uni = baseline_distances(Method::uniform, inv);
  const NaturalClassSet ncs = enumerate_natural_classes(inv);
  const DistanceMatrix fr = baseline_distances(Method::frisch, inv);
  for (std::size_t i = 0; i < inv.size(); ++i) {
    for (std::size_t j = 0; j < inv.size(); ++j) {
      if (i == j) continue;
      CHECK(pmv(i, j) == -pmv_similarity(spec, inv.phonemes()[i], inv.phonemes()[j]));
      CHECK(fr(i, j) == -frisch_similarity(ncs, i, j));
      CHECK(uni(i, j) == (inv.row(i) - inv.row(j)).cwiseAbs().sum());
      CHECK(fr(i, j) == fr(j, i));
    }
  }
  CHECK_THROWS_AS(baseline_distances(Method::ls, inv), UsageError);
}
