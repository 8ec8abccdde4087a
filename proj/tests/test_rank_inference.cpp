#include <doctest.h>

#include <cmath>

#include "catalog.hpp"
#include "rankorder/errors.hpp"
#include "rankorder/oracle.hpp"
#include "rankorder/rank_inference.hpp"

using namespace rankorder;
using rankorder::testing::at;

namespace {

// ((a,b)uAB,((c,d)uCD,e)w)root: the three rank functions are
// root uAB w uCD / root w uAB uCD / root w uCD uAB.
const char* kT5 = "((a,b)uAB,((c,d)uCD,e)w)root;";

}  // namespace

TEST_CASE("rank_probabilities: worked examples") {
  const auto cat = parse_newick("(((a,b)x3,c)x2,d)x1;");
  const auto deepest = rank_probabilities(cat, at(cat, "x3"));
  CHECK(deepest.size() == 3);
  CHECK(deepest.at(3) == 1);
  CHECK(deepest.at(1) == 0);
  CHECK(deepest.at(2) == 0);

  const auto t5 = parse_newick(kT5);
  const auto ab = rank_probabilities(t5, at(t5, "uAB"));
  CHECK(ab.at(1) == 0);
  CHECK(ab.at(2) == Rational(1, 3));
  CHECK(ab.at(3) == Rational(1, 3));
  CHECK(ab.at(4) == Rational(1, 3));

  const auto cd = rank_probabilities(t5, at(t5, "uCD"));
  CHECK(cd.at(3) == Rational(1, 3));
  CHECK(cd.at(4) == Rational(2, 3));
  CHECK(cd.at(2) == 0);

  const auto root = rank_probabilities(t5, t5.root());
  CHECK(root.at(1) == 1);
}

TEST_CASE("rank_probabilities: errors") {
  const auto t5 = parse_newick(kT5);
  CHECK_THROWS_WITH_AS(rank_probabilities(t5, at(t5, "a")), "vertex 'a' is a leaf", ContractError);
  CHECK_THROWS_AS(rank_probabilities(t5, VertexId{42}), ContractError);
}

TEST_CASE("rank_probabilities equals the enumeration oracle on the catalog") {
  for (const auto& t : testing::shape_catalog(6)) {
    const BinomialTable binom(t.interior_count() + 1);
    for (auto v : t.interior_vertices()) {
      const auto fast = rank_probabilities(t, v, binom);
      const auto brute = brute_rank_probabilities(t, v);
      REQUIRE(fast.size() == brute.size());
      for (std::size_t i = 1; i <= fast.size(); ++i) CHECK(fast.at(i) == brute.at(i));
    }
  }
}

TEST_CASE("rank distribution support and normalisation") {
  for (const auto& t : testing::shape_catalog(6)) {
    for (auto v : t.interior_vertices()) {
      const auto d = rank_probabilities(t, v);
      Rational sum = 0;
      std::size_t ancestors = 0;
      for (auto p = t.parent(v); p; p = t.parent(*p)) ++ancestors;
      const std::size_t below = t.interior_below(v) - 1;
      for (std::size_t i = 1; i <= d.size(); ++i) {
        sum += d.at(i);
        CHECK(d.at(i) >= 0);
        if (i < 1 + ancestors || i > t.interior_count() - below) CHECK(d.at(i) == 0);
        CHECK(d.at(i).get_den() > 0);
      }
      CHECK(sum == 1);
    }
  }
}

TEST_CASE("alpha table invariants") {
  const auto t = parse_newick("(((a,b)x,(c,(d,e)))y,((f,g),h));");
  for (auto v : t.interior_vertices()) {
    const auto table = alpha_table(t, v);
    REQUIRE(!table.steps.empty());
    CHECK(table.steps[0].size() == t.interior_below(v));
    CHECK(table.steps[0][0] == 1);
    for (std::size_t i = 1; i < table.steps[0].size(); ++i) CHECK(table.steps[0][i] == 0);
    CHECK(table.steps.back().size() == t.interior_count());
    for (std::size_t m = 1; m <= table.steps.size(); ++m) {
      const auto& row = table.steps[m - 1];
      for (std::size_t i = 1; i < m && i <= row.size(); ++i) CHECK(row[i - 1] == 0);
    }
  }
}

TEST_CASE("rank_moments") {
  RankDistribution uniform{VertexId{0}, {0, Rational(1, 3), Rational(1, 3), Rational(1, 3)}};
  auto s = rank_moments(uniform);
  CHECK(s.mean == 3);
  CHECK(s.variance == Rational(2, 3));

  RankDistribution point{VertexId{0}, {0, 0, 1, 0}};
  s = rank_moments(point);
  CHECK(s.mean == 3);
  CHECK(s.variance == 0);

  RankDistribution skew{VertexId{0}, {0, 0, Rational(1, 3), Rational(2, 3)}};
  s = rank_moments(skew);
  CHECK(s.mean == Rational(11, 3));
  CHECK(s.variance == Rational(2, 9));
}

TEST_CASE("joint_rank_prob: worked examples") {
  const auto t5 = parse_newick(kT5);
  const auto wx = joint_rank_prob(t5, at(t5, "w"), at(t5, "uCD"));
  CHECK(wx.q.size() == 3);
  CHECK(wx.at(2, 3) == Rational(1, 3));
  CHECK(wx.at(2, 4) == Rational(1, 3));
  CHECK(wx.at(3, 4) == Rational(1, 3));

  const auto rw = joint_rank_prob(t5, t5.root(), at(t5, "w"));
  CHECK(rw.q.size() == 2);
  CHECK(rw.at(1, 2) == Rational(2, 3));
  CHECK(rw.at(1, 3) == Rational(1, 3));

  // Root with an interior child whose sibling is a leaf: root always rank 1.
  const auto cat = parse_newick("(((a,b),c)y,d)r;");
  for (const auto& [key, q] : joint_rank_prob(cat, cat.root(), at(cat, "y")).q) CHECK(key.first == 1);
}

TEST_CASE("joint_rank_prob: errors") {
  const auto t5 = parse_newick(kT5);
  CHECK_THROWS_AS(joint_rank_prob(t5, at(t5, "uCD"), at(t5, "w")), ContractError);
  CHECK_THROWS_AS(joint_rank_prob(t5, at(t5, "uAB"), at(t5, "uCD")), ContractError);
  CHECK_THROWS_AS(joint_rank_prob(t5, at(t5, "w"), at(t5, "c")), ContractError);
  CHECK_THROWS_AS(joint_rank_prob(t5, at(t5, "w"), at(t5, "w")), ContractError);
}

TEST_CASE("joint_rank_prob equals the oracle for every ancestral pair") {
  for (const auto& t : testing::shape_catalog(6)) {
    for (auto u : t.interior_vertices()) {
      for (auto v : t.interior_vertices()) {
        if (!t.is_ancestor(u, v)) continue;
        const auto fast = joint_rank_prob(t, u, v);
        const auto brute = brute_joint(t, u, v);
        CHECK(fast.q == brute.q);
      }
    }
  }
}

TEST_CASE("joint marginal over j equals the rank distribution of u") {
  for (const auto& t : testing::shape_catalog(6)) {
    for (auto u : t.interior_vertices()) {
      const auto pu = rank_probabilities(t, u);
      for (auto v : t.interior_vertices()) {
        if (!t.is_ancestor(u, v)) continue;
        std::vector<Rational> marginal(t.interior_count() + 1, Rational(0));
        Rational total = 0;
        for (const auto& [key, q] : joint_rank_prob(t, u, v).q) {
          CHECK(key.first < key.second);
          marginal[key.first] += q;
          total += q;
        }
        CHECK(total == 1);
        for (std::size_t i = 1; i <= pu.size(); ++i) CHECK(marginal[i] == pu.at(i));
      }
    }
  }
}

TEST_CASE("falling-factorial form agrees with the binomial form") {
  for (const auto& t : testing::shape_catalog(7)) {
    for (auto v : t.interior_vertices()) {
      if (v == t.root()) continue;
      const auto u = *t.parent(v);
      CHECK(joint_rank_prob_falling_factorial(t, u, v).q == joint_rank_prob(t, u, v).q);
    }
  }
  const auto t5 = parse_newick(kT5);
  CHECK_THROWS_AS(joint_rank_prob_falling_factorial(t5, t5.root(), at(t5, "uCD")), ContractError);
}

TEST_CASE("compare: worked examples") {
  const auto sym = parse_newick("((a,b)x,(c,d)y)r;");
  CHECK(compare(sym, at(sym, "x"), at(sym, "y")) == Rational(1, 2));

  const auto t5 = parse_newick(kT5);
  const auto ab = at(t5, "uAB");
  const auto cd = at(t5, "uCD");
  const auto w = at(t5, "w");
  CHECK(compare(t5, ab, cd) == Rational(2, 3));
  CHECK(compare(t5, ab, w) == Rational(1, 3));
  CHECK(compare(t5, w, cd) == 1);
  CHECK(compare(t5, cd, w) == 0);
  CHECK(compare(t5, t5.root(), ab) == 1);
}

TEST_CASE("compare: errors") {
  const auto t5 = parse_newick(kT5);
  CHECK_THROWS_AS(compare(t5, at(t5, "w"), at(t5, "w")), ContractError);
  CHECK_THROWS_AS(compare(t5, at(t5, "a"), at(t5, "w")), ContractError);
  CHECK_THROWS_AS(compare(t5, at(t5, "w"), at(t5, "e")), ContractError);
}

TEST_CASE("compare equals the oracle and is complementary") {
  for (const auto& t : testing::shape_catalog(6)) {
    const auto interior = t.interior_vertices();
    for (auto u : interior) {
      for (auto v : interior) {
        if (u == v) continue;
        const auto p = compare(t, u, v);
        CHECK(p == brute_compare(t, u, v));
        CHECK(p + compare(t, v, u) == 1);
      }
    }
  }
}

TEST_CASE("compare is not symmetric for incomparable vertices") {
  const auto t5 = parse_newick(kT5);
  const auto p = compare(t5, at(t5, "uAB"), at(t5, "uCD"));
  CHECK_FALSE(t5.is_ancestor(at(t5, "uAB"), at(t5, "uCD")));
  CHECK_FALSE(t5.is_ancestor(at(t5, "uCD"), at(t5, "uAB")));
  CHECK(p != Rational(1, 2));
}

TEST_CASE("outputs do not depend on child order") {
  const auto t = parse_newick("(((a,b)p,(c,(d,e)q)s)y,((f,g)z,h,(i,j)k)m)r;");
  auto reverse_all = [](VertexId, std::size_t k) {
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = k - 1 - i;
    return perm;
  };
  auto rotate = [](VertexId v, std::size_t k) {
    std::vector<std::size_t> perm(k);
    for (std::size_t i = 0; i < k; ++i) perm[i] = (i + v.index) % k;
    return perm;
  };
  for (int variant = 0; variant < 2; ++variant) {
    const auto p = variant == 0 ? permute_children(t, reverse_all) : permute_children(t, rotate);
    for (auto v : t.interior_vertices()) {
      const auto pv = p.vertex(t.name(v));
      const auto a = rank_probabilities(t, v);
      const auto b = rank_probabilities(p, pv);
      CHECK(a.p == b.p);
      for (auto u : t.interior_vertices()) {
        if (u == v) continue;
        CHECK(compare(t, u, v) == compare(p, p.vertex(t.name(u)), pv));
        if (t.is_ancestor(u, v)) CHECK(joint_rank_prob(t, u, v).q == joint_rank_prob(p, p.vertex(t.name(u)), pv).q);
      }
    }
  }
}

TEST_CASE("floating-point path agrees with the exact path") {
  Rng rng(7);
  for (int k = 0; k < 20; ++k) {
    const auto t = testing::random_binary_tree(5 + static_cast<std::size_t>(k) * 3, rng);
    for (auto v : t.interior_vertices()) {
      const auto exact = rank_probabilities(t, v);
      const auto fp = rank_probabilities_fp(t, v);
      REQUIRE(fp.size() == exact.size());
      for (std::size_t i = 1; i <= fp.size(); ++i) CHECK(fp[i - 1] == doctest::Approx(exact.at(i).get_d()).epsilon(1e-9));
    }
  }
  const auto big = testing::caterpillar(2001);
  const auto deepest = big.interior_vertices().back();
  const auto fp = rank_probabilities_fp(big, deepest);
  CHECK(fp.size() == 2000);
  CHECK(fp.back() == doctest::Approx(1.0));
}

TEST_CASE("exact path handles large binomials") {
  // 101 cherries: rank weights involve C(n, k) far beyond 64 bits.
  std::string text = "(";
  for (int k = 0; k < 101; ++k) text += (k ? ",(a" : "(a") + std::to_string(k) + ",b" + std::to_string(k) + ")";
  text += ");";
  const auto t = parse_newick(text);
  const auto d = rank_probabilities(t, t.children(t.root())[0]);
  for (std::size_t i = 2; i <= d.size(); ++i) CHECK(d.at(i) == Rational(1, 101));
}
