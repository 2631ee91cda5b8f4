#include <doctest.h>

#include <set>

#include "confmetric/csv.hpp"
#include "confmetric/error.hpp"
#include "confmetric/inventory.hpp"
#include "generators.hpp"

using namespace confmetric;

namespace {

int differing_columns(const Inventory& inv, std::string_view a, std::string_view b) {
  return static_cast<int>((inv.row(a) - inv.row(b)).cwiseAbs().sum());
}

}  // namespace

TEST_CASE("bundled inventories have the marked phoneme counts") {
  CHECK(load_inventory(TheoryId::articulatory, DatasetId::hebrew).size() == 19);
  CHECK(load_inventory(TheoryId::phonological, DatasetId::hebrew).size() == 19);
  CHECK(load_inventory(TheoryId::articulatory, DatasetId::nm).size() == 17);
  CHECK(load_inventory(TheoryId::articulatory, DatasetId::luce).size() == 23);
  CHECK(bundled_theory(TheoryId::articulatory).arity() == 14);
  CHECK(bundled_theory(TheoryId::phonological).arity() == 12);
}

TEST_CASE("phonological /p/ sets only cn and lb") {
  const Inventory inv = load_inventory(TheoryId::phonological, DatasetId::hebrew);
  const FeatureVector p = inv.row("p");
  const auto& names = inv.theory().feature_names();
  for (std::size_t k = 0; k < names.size(); ++k) {
    const double expected = (names[k] == "cn" || names[k] == "lb") ? 1.0 : 0.0;
    CHECK_MESSAGE(p(static_cast<Eigen::Index>(k)) == expected, names[k]);
  }
}

TEST_CASE("articulatory /p/ and /b/ differ only in vc") {
  const Inventory inv = load_inventory(TheoryId::articulatory, DatasetId::hebrew);
  const FeatureVector diff = inv.row("p") - inv.row("b");
  CHECK(diff.cwiseAbs().sum() == 1.0);
  CHECK(diff(static_cast<Eigen::Index>(*inv.theory().index_of("vc"))) != 0.0);
}

TEST_CASE("every bundled table has pairwise distinct rows") {
  for (TheoryId t : {TheoryId::articulatory, TheoryId::phonological}) {
    const Inventory inv = bundled_table(t);
    for (std::size_t i = 0; i < inv.size(); ++i)
      for (std::size_t j = i + 1; j < inv.size(); ++j) CHECK(inv.row(i) != inv.row(j));
    CHECK(inv.has_distinct_rows());
  }
}

TEST_CASE("articulatory place and manner blocks are one-hot") {
  const Inventory inv = bundled_table(TheoryId::articulatory);
  for (std::size_t i = 0; i < inv.size(); ++i) {
    const FeatureVector r = inv.row(i);
    CHECK_MESSAGE(r.segment(0, 6).sum() == 1.0, inv.phonemes()[i]);
    CHECK_MESSAGE(r.segment(6, 7).sum() == 1.0, inv.phonemes()[i]);
  }
}

TEST_CASE("load_inventory is deterministic") {
  CHECK(load_inventory(TheoryId::articulatory, DatasetId::luce) == load_inventory(TheoryId::articulatory, DatasetId::luce));
}

TEST_CASE("parse_feature_table accepts +/- and 1/0") {
  const Inventory inv = parse_feature_table("phoneme,f\na,+\nb,-\n");
  CHECK(inv.size() == 2);
  CHECK(inv.arity() == 1);
  CHECK(inv.row("a")(0) == 1.0);
  CHECK(inv.row("b")(0) == 0.0);
  CHECK(parse_feature_table("phoneme,x,y\na,1,0\nb,0,1\n").row("b")(1) == 1.0);
}

TEST_CASE("parse_feature_table rejects malformed tables with a location") {
  auto message = [](std::string_view text) {
    try {
      parse_feature_table(text);
    } catch (const DataError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("phoneme,f,g\na,+,-\nb,+,-\n").find("duplicate feature vector") != std::string::npos);
  CHECK(message("phoneme,f\na,+\na,-\n").find("duplicate phoneme label") != std::string::npos);
  const std::string bad_cell = message("phoneme,f,g\na,+,x\nb,-,-\n");
  CHECK(bad_cell.find("line 2") != std::string::npos);
  CHECK(bad_cell.find("column 3") != std::string::npos);
  CHECK(message("phoneme,f,g\na,+\nb,-,-\n").find("expected 3 cells") != std::string::npos);
  CHECK(message("phoneme,f\na,+\n").find("at least two") != std::string::npos);
}

TEST_CASE("serialize then parse is the identity on bundled tables") {
  for (TheoryId t : {TheoryId::articulatory, TheoryId::phonological}) {
    for (DatasetId d : {DatasetId::nm, DatasetId::luce, DatasetId::hebrew}) {
      const Inventory inv = load_inventory(t, d);
      const Inventory back = parse_feature_table(serialize_feature_table(inv), inv.theory().name());
      CHECK(back == inv);
    }
  }
}

TEST_CASE("serialize/parse round-trips random inventories") {
  testsupport::Gen gen(11);
  for (int trial = 0; trial < 50; ++trial) {
    const int n_f = gen.integer(1, 8);
    const int n_p = gen.integer(2, std::min(20, 1 << n_f));
    const Inventory inv = gen.inventory(n_p, n_f);
    CHECK(parse_feature_table(serialize_feature_table(inv), "synthetic") == inv);
  }
}

TEST_CASE("drop_feature removes one column and may merge rows") {
  const Inventory inv = load_inventory(TheoryId::articulatory, DatasetId::hebrew);
  const Inventory dropped = drop_feature(inv, "vc");
  CHECK(dropped.arity() == 13);
  CHECK(dropped.size() == inv.size());
  CHECK(!dropped.theory().index_of("vc"));
  CHECK(dropped.row("p") == dropped.row("b"));
  CHECK(!dropped.has_distinct_rows());
  CHECK_THROWS_AS(drop_feature(inv, "nope"), DataError);
}

TEST_CASE("select keeps the requested order") {
  const Inventory inv = bundled_table(TheoryId::phonological);
  const std::vector<std::string> labels{"z", "b", "m"};
  const Inventory sub = inv.select(labels);
  CHECK(sub.phonemes() == labels);
  CHECK(sub.row("m") == inv.row("m"));
}

TEST_CASE("differing-column counts from the table") {
  const Inventory art = bundled_table(TheoryId::articulatory);
  CHECK(differing_columns(art, "t", "m") == 5);
  CHECK(differing_columns(art, "p", "b") == 1);
  const Inventory phon = bundled_table(TheoryId::phonological);
  CHECK(differing_columns(phon, "p", "b") == 1);
}

TEST_CASE("theory and dataset names parse") {
  CHECK(parse_theory_id("phonological") == TheoryId::phonological);
  CHECK(parse_dataset_id("hebrew") == DatasetId::hebrew);
  CHECK_THROWS_AS(parse_theory_id("acoustic"), UsageError);
  CHECK_THROWS_AS(parse_dataset_id("klingon"), UsageError);
  CHECK_THROWS_AS(FeatureTheory("x", {"a", "a"}), DataError);
}

TEST_CASE("csv reader splits quoted cells and skips comments") {
  const auto rows = csv::read("# comment\na, \"b,c\" ,d\n\ne,f\n");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].line == 2);
  CHECK(rows[0].cells == std::vector<std::string>{"a", "b,c", "d"});
  CHECK(rows[1].cells.size() == 2);
  CHECK(csv::escape("x,y") == "\"x,y\"");
  CHECK(csv::escape("plain") == "plain");
  CHECK_THROWS_AS(csv::read("\"open\n"), DataError);
  CHECK(std::stod(csv::format_double(0.1)) == 0.1);
}
