#include "rankorder/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rankorder/errors.hpp"

namespace rankorder {

bool is_valid_rank_function(const PhyloTree& tree, const RankFunction& r) {
  const auto interior = tree.interior_count();
  if (r.order.size() != interior || r.rank_of.size() != tree.vertex_count()) return false;
  std::vector<bool> seen(tree.vertex_count(), false);
  for (std::size_t k = 0; k < r.order.size(); ++k) {
    const auto v = r.order[k];
    if (!tree.contains(v) || tree.is_leaf(v) || seen[v.index]) return false;
    seen[v.index] = true;
    if (r.rank_of[v.index] != k + 1) return false;
  }
  for (auto v : tree.vertices()) {
    if (tree.is_leaf(v)) {
      if (r.rank_of[v.index] != 0) return false;
      continue;
    }
    if (auto p = tree.parent(v); p && r.rank_of[p->index] >= r.rank_of[v.index]) return false;
  }
  return true;
}

namespace {

RankFunction from_order(const PhyloTree& tree, std::vector<VertexId> order) {
  RankFunction r{std::move(order), std::vector<std::size_t>(tree.vertex_count(), 0)};
  for (std::size_t k = 0; k < r.order.size(); ++k) r.rank_of[r.order[k].index] = k + 1;
  return r;
}

void check_limit(const PhyloTree& tree, std::size_t limit) {
  if (tree.interior_count() == 0) throw ContractError("tree has no interior vertex");
  if (tree.interior_count() > limit) {
    throw EnumerationLimitError("tree has " + std::to_string(tree.interior_count()) +
                                " interior vertices, enumeration limit is " + std::to_string(limit));
  }
}

void enumerate(const PhyloTree& tree, std::vector<VertexId>& available, std::vector<VertexId>& prefix,
               std::vector<RankFunction>& out) {
  if (available.empty()) {
    out.push_back(from_order(tree, prefix));
    return;
  }
  // `available` stays sorted; each choice removes one vertex and adds its
  // interior children.
  for (std::size_t k = 0; k < available.size(); ++k) {
    const VertexId v = available[k];
    std::vector<VertexId> next;
    next.reserve(available.size() + tree.children(v).size());
    for (std::size_t m = 0; m < available.size(); ++m)
      if (m != k) next.push_back(available[m]);
    for (auto c : tree.children(v))
      if (!tree.is_leaf(c)) next.push_back(c);
    std::sort(next.begin(), next.end());
    prefix.push_back(v);
    enumerate(tree, next, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

std::vector<RankFunction> enumerate_rank_functions(const PhyloTree& tree, std::size_t limit) {
  check_limit(tree, limit);
  std::vector<RankFunction> out;
  std::vector<VertexId> available{tree.root()};
  std::vector<VertexId> prefix;
  enumerate(tree, available, prefix, out);
  return out;
}

RankDistribution brute_rank_probabilities(const PhyloTree& tree, VertexId v, std::size_t limit) {
  tree.check_interior(v);
  const auto all = enumerate_rank_functions(tree, limit);
  std::vector<BigCount> hits(tree.interior_count(), BigCount(0));
  for (const auto& r : all) hits[r.rank(v) - 1] += 1;
  RankDistribution dist{v, {}};
  for (const auto& h : hits) dist.p.push_back(make_rational(h, all.size()));
  return dist;
}

Rational brute_compare(const PhyloTree& tree, VertexId u, VertexId v, std::size_t limit) {
  tree.check_interior(u);
  tree.check_interior(v);
  if (u == v) throw ContractError("compare needs two distinct vertices");
  const auto all = enumerate_rank_functions(tree, limit);
  unsigned long hits = 0;
  for (const auto& r : all) hits += r.rank(u) < r.rank(v) ? 1 : 0;
  return make_rational(hits, all.size());
}

JointRankTable brute_joint(const PhyloTree& tree, VertexId u, VertexId v, std::size_t limit) {
  tree.check_interior(u);
  tree.check_interior(v);
  if (!tree.is_ancestor(u, v)) {
    throw ContractError("'" + tree.name(u) + "' is not a proper ancestor of '" + tree.name(v) + "'");
  }
  const auto all = enumerate_rank_functions(tree, limit);
  std::map<std::pair<std::size_t, std::size_t>, unsigned long> hits;
  for (const auto& r : all) ++hits[{r.rank(u), r.rank(v)}];
  JointRankTable table{u, v, {}};
  for (const auto& [key, h] : hits) table.q.emplace(key, make_rational(h, all.size()));
  return table;
}

std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw ContractError("uniform_below needs a positive bound");
  // Largest multiple of bound that fits; reject the partial top block.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

double uniform_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

RankFunction sample_rank_function(const PhyloTree& tree, Rng& rng) {
  if (tree.interior_count() == 0) throw ContractError("tree has no interior vertex");
  std::vector<std::vector<VertexId>> seq(tree.vertex_count());
  // Reverse preorder visits children before parents.
  for (std::size_t k = tree.vertex_count(); k-- > 0;) {
    const VertexId v{static_cast<std::uint32_t>(k)};
    if (tree.is_leaf(v)) continue;
    std::vector<VertexId> merged;
    for (auto c : tree.children(v)) {
      auto& other = seq[c.index];
      if (other.empty()) continue;
      std::vector<VertexId> out;
      out.reserve(merged.size() + other.size());
      std::size_t a = 0;
      std::size_t b = 0;
      while (a < merged.size() || b < other.size()) {
        const std::uint64_t left_a = merged.size() - a;
        const std::uint64_t left_b = other.size() - b;
        if (uniform_below(rng, left_a + left_b) < left_a) {
          out.push_back(merged[a++]);
        } else {
          out.push_back(other[b++]);
        }
      }
      merged = std::move(out);
      std::vector<VertexId>().swap(other);
    }
    seq[k].reserve(merged.size() + 1);
    seq[k].push_back(v);
    seq[k].insert(seq[k].end(), merged.begin(), merged.end());
  }
  return from_order(tree, std::move(seq[tree.root().index]));
}

RankFunction sample_rank_function(const PhyloTree& tree, std::uint64_t seed) {
  Rng rng(seed);
  return sample_rank_function(tree, rng);
}

std::map<VertexId, double> sample_yule_times(const PhyloTree& tree, const RankFunction& rank, Rng& rng) {
  if (!is_valid_rank_function(tree, rank)) throw ContractError("not a rank function of this tree");
  const std::size_t last = tree.interior_count();
  // time[k]: time of the k-th event; after it k + 1 lineages split at rate 1.
  std::vector<double> time(last + 1, 0.0);
  for (std::size_t k = 1; k < last; ++k) {
    time[k + 1] = time[k] - std::log1p(-uniform_unit(rng)) / static_cast<double>(k + 1);
  }
  std::map<VertexId, double> out;
  for (auto v : tree.vertices()) {
    if (v == tree.root()) continue;
    const double start = time[rank.rank(*tree.parent(v))];
    const double end = tree.is_leaf(v) ? time[last] : time[rank.rank(v)];
    out.emplace(v, end - start);
  }
  return out;
}

std::map<VertexId, double> sample_yule_times(const PhyloTree& tree, const RankFunction& rank, std::uint64_t seed) {
  Rng rng(seed);
  return sample_yule_times(tree, rank, rng);
}

}  // namespace rankorder
