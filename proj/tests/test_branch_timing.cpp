#include <doctest.h>

#include "catalog.hpp"
#include "rankorder/branch_timing.hpp"
#include "rankorder/combinatorics.hpp"
#include "rankorder/errors.hpp"
#include "rankorder/oracle.hpp"

using namespace rankorder;
using rankorder::testing::at;

namespace {

const char* kT5 = "((a,b)uAB,((c,d)uCD,e)w)root;";

Rational harmonic_tail(std::size_t n) {
  Rational s = 0;
  for (std::size_t k = 1; k + 2 <= n; ++k) s += Rational(1, static_cast<unsigned long>(k + 1));
  return s;
}

}  // namespace

TEST_CASE("expected_waiting_sum") {
  CHECK(expected_waiting_sum(2, 3, TimingModel::Yule) == Rational(1, 3));
  CHECK(expected_waiting_sum(2, 4, TimingModel::Yule) == Rational(7, 12));
  CHECK(expected_waiting_sum(3, 4, TimingModel::Coalescent) == Rational(1, 12));
  CHECK(expected_waiting_sum(2, 4, TimingModel::Coalescent) == Rational(1, 4));
  CHECK(expected_waiting_sum(1, 2, TimingModel::Coalescent) == Rational(1, 2));
  CHECK_THROWS_AS(expected_waiting_sum(3, 3, TimingModel::Yule), ContractError);
  CHECK_THROWS_AS(expected_waiting_sum(0, 3, TimingModel::Yule), ContractError);
}

TEST_CASE("timing model names") {
  CHECK(parse_timing_model("yule") == TimingModel::Yule);
  CHECK(parse_timing_model("coalescent") == TimingModel::Coalescent);
  CHECK(to_string(TimingModel::Coalescent) == "coalescent");
  CHECK_THROWS_AS(parse_timing_model("birth-death"), ContractError);
}

TEST_CASE("interior_edge_length: worked examples") {
  const auto cat = parse_newick("(((a,b)x3,c)x2,d)x1;");
  CHECK(interior_edge_length(cat, at(cat, "x2"), at(cat, "x3"), TimingModel::Yule) == Rational(1, 3));
  CHECK(interior_edge_length(cat, at(cat, "x1"), at(cat, "x2"), TimingModel::Yule) == Rational(1, 2));

  const auto t5 = parse_newick(kT5);
  const auto w = at(t5, "w");
  const auto cd = at(t5, "uCD");
  CHECK(interior_edge_length(t5, w, cd, TimingModel::Yule) == Rational(7, 18));
  CHECK(interior_edge_length(t5, w, cd, TimingModel::Coalescent) == Rational(1, 6));
  CHECK(interior_edge_length(t5, t5.root(), w, TimingModel::Yule) == Rational(11, 18));
}

TEST_CASE("interior_edge_length: errors") {
  const auto t5 = parse_newick(kT5);
  CHECK_THROWS_AS(interior_edge_length(t5, t5.root(), at(t5, "uCD"), TimingModel::Yule), ContractError);
  CHECK_THROWS_AS(interior_edge_length(t5, at(t5, "w"), at(t5, "e"), TimingModel::Yule), ContractError);
  const auto poly = parse_newick("((a,b)x,c,d)r;");
  CHECK_THROWS_AS(interior_edge_length(poly, poly.root(), at(poly, "x"), TimingModel::Yule), ContractError);
}

TEST_CASE("interior_edge_length equals the enumeration average") {
  for (const auto& t : testing::shape_catalog(6)) {
    if (!is_binary(t)) continue;
    const auto all = enumerate_rank_functions(t);
    for (auto v : t.interior_vertices()) {
      if (v == t.root()) continue;
      const auto u = *t.parent(v);
      for (auto model : {TimingModel::Yule, TimingModel::Coalescent}) {
        Rational sum = 0;
        for (const auto& r : all) sum += expected_waiting_sum(r.rank(u), r.rank(v), model);
        CHECK(interior_edge_length(t, u, v, model) == sum / Rational(all.size()));
      }
    }
  }
}

TEST_CASE("pendant_edge_length") {
  const auto cat = parse_newick("(((a,b)x3,c)x2,d)x1;");
  CHECK(pendant_edge_length(cat, at(cat, "x3")) == 0);
  CHECK(pendant_edge_length(cat, at(cat, "x1")) == Rational(5, 6));
  const auto t5 = parse_newick(kT5);
  CHECK(pendant_edge_length(t5, at(t5, "w")) == Rational(17, 36));
  CHECK_THROWS_AS(pendant_edge_length(t5, t5.root()), ContractError);
}

TEST_CASE("date_tree: leaf depths obey a clock") {
  const auto cat = parse_newick("(((a,b)x3,c)x2,d)x1;");
  const auto report = date_tree(cat, TimingModel::Yule, true);
  CHECK(report.leaf_depths.size() == 4);
  for (const auto& [leaf, depth] : report.leaf_depths) CHECK(depth == Rational(5, 6));

  const auto t5 = parse_newick(kT5);
  for (const auto& [leaf, depth] : date_tree(t5, TimingModel::Yule, true).leaf_depths) CHECK(depth == Rational(13, 12));

  Rng rng(11);
  for (int k = 0; k < 25; ++k) {
    const auto n = 3 + uniform_below(rng, 20);
    const auto t = testing::random_binary_tree(n, rng);
    const auto r = date_tree(t, TimingModel::Yule, true);
    CHECK(r.leaf_depths.size() == n);
    CHECK(r.pendant.size() == n);
    CHECK(r.interior.size() == t.interior_count() - 1);
    for (const auto& [leaf, depth] : r.leaf_depths) CHECK(depth == harmonic_tail(n));
  }
}

TEST_CASE("date_tree: model and shape rules") {
  const auto t5 = parse_newick(kT5);
  CHECK_THROWS_AS(date_tree(t5, TimingModel::Coalescent, true), ContractError);
  const auto plain = date_tree(t5, TimingModel::Coalescent, false);
  CHECK(plain.pendant.empty());
  CHECK(plain.leaf_depths.empty());
  CHECK(plain.interior.at(at(t5, "uCD")) == Rational(1, 6));

  const auto poly = parse_newick("((a,b)x,(c,d,e)y)r;");
  CHECK_THROWS_AS(date_tree(poly, TimingModel::Yule, false), ContractError);
  CHECK_THROWS_AS(date_tree(poly, TimingModel::Yule, true, kDefaultMaxResolutions), ContractError);
  const auto report = date_tree(poly, TimingModel::Yule, false, kDefaultMaxResolutions);
  CHECK(report.interior.size() == 2);
  CHECK(report.interior.at(at(poly, "y")) == Rational(11, 18));
  CHECK(report.interior.at(at(poly, "x")) == Rational(29, 36));
}

TEST_CASE("resolve_polytomies") {
  const auto poly = parse_newick("((a,b),(c,d,e));");
  CHECK(count_resolutions(poly) == 3);
  const auto set = resolve_polytomies(poly);
  REQUIRE(set.resolutions.size() == 3);
  for (const auto& r : set.resolutions) {
    CHECK(is_binary(r.tree));
    CHECK(r.tree.leaf_count() == 5);
    CHECK(r.weight / set.total_weight() == Rational(1, 3));
    CHECK(r.correspondence.size() == poly.vertex_count());
    for (auto v : poly.leaves()) CHECK(r.tree.label(r.correspondence[v.index]) == poly.label(v));
  }
  CHECK(set.resolutions[0].tree != set.resolutions[1].tree);
  CHECK(set.resolutions[1].tree != set.resolutions[2].tree);
  CHECK(set.resolutions[0].tree != set.resolutions[2].tree);

  const auto binary = parse_newick("((a,b),c);");
  CHECK(count_resolutions(binary) == 1);
  CHECK(resolve_polytomies(binary).resolutions.size() == 1);

  // Every leaf-labelled binary topology on a star shows up exactly once.
  const auto star5 = parse_newick("(t0,t1,t2,t3,t4);");
  const auto star_set = resolve_polytomies(star5);
  CHECK(star_set.resolutions.size() == 105);
  CHECK(star_set.total_weight() == 1);
}

TEST_CASE("resolution cap") {
  const auto star = parse_newick("(a,b,c,d,e,f,g,h,i);");
  CHECK(count_resolutions(star) == 2027025);
  try {
    resolve_polytomies(star);
    FAIL("expected the resolution cap to trigger");
  } catch (const ResolutionLimitError& e) {
    CHECK(std::string(e.what()).find("2027025") != std::string::npos);
  }
  CHECK_THROWS_AS(date_tree(star, TimingModel::Yule, false, 100), ResolutionLimitError);
  CHECK(resolve_polytomies(parse_newick("(a,b,c,d,e);"), 105).resolutions.size() == 105);
  CHECK_THROWS_AS(resolve_polytomies(parse_newick("(a,b,c,d,e);"), 104), ResolutionLimitError);
}

TEST_CASE("polytomy_edge_length matches the hand-weighted average") {
  const auto poly = parse_newick("((a,b)x,(c,d,e)y)r;");
  const auto set = resolve_polytomies(poly);
  for (const char* child : {"x", "y"}) {
    const auto v = at(poly, child);
    Rational expected = 0;
    for (const auto& r : set.resolutions) {
      const auto& t = r.tree;
      Rational path = 0;
      for (auto w = r.correspondence[v.index]; w != r.correspondence[poly.root().index]; w = *t.parent(w))
        path += interior_edge_length(t, *t.parent(w), w, TimingModel::Yule);
      expected += r.weight * path;
    }
    expected /= set.total_weight();
    CHECK(polytomy_edge_length(poly, poly.root(), v, TimingModel::Yule) == expected);
  }

  // Child of a polytomy: paths pass through inserted vertices.
  const auto deep = parse_newick("((a,b)x,(c,d)z,e)r;");
  const auto z = at(deep, "z");
  const auto length = polytomy_edge_length(deep, deep.root(), z, TimingModel::Coalescent);
  CHECK(length > 0);
  CHECK_THROWS_AS(polytomy_edge_length(deep, deep.root(), deep.vertex("e"), TimingModel::Yule), ContractError);
}

TEST_CASE("polytomy_edge_length reduces to interior_edge_length on binary trees") {
  for (const auto& t : testing::shape_catalog(6)) {
    if (!is_binary(t)) continue;
    for (auto v : t.interior_vertices()) {
      if (v == t.root()) continue;
      const auto u = *t.parent(v);
      for (auto model : {TimingModel::Yule, TimingModel::Coalescent})
        CHECK(polytomy_edge_length(t, u, v, model) == interior_edge_length(t, u, v, model));
    }
  }
}

TEST_CASE("Monte Carlo edge lengths agree with the exact values") {
  const auto t5 = parse_newick(kT5);
  const auto w = at(t5, "w");
  const auto cd = at(t5, "uCD");
  const auto e = t5.vertex("e");
  Rng rng(2024);
  const int draws = 200000;
  double edge = 0;
  double pendant = 0;
  for (int k = 0; k < draws; ++k) {
    const auto r = sample_rank_function(t5, rng);
    const auto times = sample_yule_times(t5, r, rng);
    edge += times.at(cd);
    pendant += times.at(e);
    CHECK_FALSE(times.count(t5.root()));
  }
  CHECK(edge / draws == doctest::Approx(Rational(7, 18).get_d()).epsilon(0.01));
  CHECK(pendant / draws == doctest::Approx(Rational(17, 36).get_d()).epsilon(0.01));
  CHECK(interior_edge_length(t5, w, cd, TimingModel::Yule) == Rational(7, 18));
}
