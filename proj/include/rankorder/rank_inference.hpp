#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "rankorder/combinatorics.hpp"
#include "rankorder/numeric.hpp"
#include "rankorder/tree.hpp"

namespace rankorder {

// Exact distribution of the rank of one interior vertex under the uniform
// distribution on rank functions. Ranks are 1-based: p[i - 1] = P[r(v) = i].
struct RankDistribution {
  VertexId vertex;
  std::vector<Rational> p;

  std::size_t size() const { return p.size(); }
  // P[r(v) = rank], zero outside 1..size().
  Rational at(std::size_t rank) const;
};

struct RankSummary {
  Rational mean;
  Rational variance;
};

// Rescaled DP state of the rank-probability recursion, one row per step of
// the path from v (step 1) to the root. steps[m - 1][i - 1] is the weight of
// rank i of v within the subtree at the m-th path vertex; rows are
// proportional to the true rank-function counts by a per-row constant.
struct AlphaTable {
  VertexId vertex;
  std::vector<std::vector<BigCount>> steps;
};

// Joint distribution of (r(u), r(v)) for u a proper ancestor of v, stored
// over its support: q[{i, j}] for i < j.
struct JointRankTable {
  VertexId u;
  VertexId v;
  std::map<std::pair<std::size_t, std::size_t>, Rational> q;

  Rational at(std::size_t i, std::size_t j) const;
};

// Shape of a rank-probability problem: the vertex's own subtree holds
// `base_interior` interior vertices; climbing one step to the next ancestor
// adds that ancestor plus `sibling_interior[m]` interior vertices from the
// subtrees hanging off it (all siblings aggregated).
struct RankPath {
  std::size_t base_interior = 0;
  std::vector<std::size_t> sibling_interior;

  std::size_t total_interior() const;
};

// Path from v up to `top` (an ancestor of v, or v itself). When `pruned` is
// given (a descendant of v), its subtree is removed and it counts as a leaf.
RankPath rank_path(const PhyloTree& tree, VertexId v, VertexId top,
                   std::optional<VertexId> pruned = std::nullopt);

// Unnormalized rank weights (the final row of the DP), index i - 1 for rank i.
// O(total^2) big-integer operations. `binomials` must cover total_interior().
std::vector<BigCount> rank_weights(const RankPath& path, const BinomialTable& binomials);

AlphaTable alpha_table(const PhyloTree& tree, VertexId v);

// Distribution of r(v) for an interior vertex v. Binary and non-binary trees.
// Throws ContractError if v is a leaf or unknown.
RankDistribution rank_probabilities(const PhyloTree& tree, VertexId v);
RankDistribution rank_probabilities(const PhyloTree& tree, VertexId v, const BinomialTable& binomials);

// Same recursion in 64-bit floating point, carried in log space so that
// trees with thousands of interior vertices neither overflow nor underflow.
std::vector<double> rank_probabilities_fp(const PhyloTree& tree, VertexId v);

RankSummary rank_moments(const RankDistribution& dist);

// P[r(u) = i, r(v) = j] for u a proper ancestor of v (both interior).
// For u = parent(v) this is the single-edge formula
//   P ∝ P_{T_u}[r(u) = i] * C(|V°_{T_u}| + |V°_{T_v}| - j, |V°_{T_v}| - 1)
// with T_v the subtree at v and T_u the tree with v's descendants removed.
// Deeper pairs chain that step along the u -> v path.
JointRankTable joint_rank_prob(const PhyloTree& tree, VertexId u, VertexId v);
JointRankTable joint_rank_prob(const PhyloTree& tree, VertexId u, VertexId v, const BinomialTable& binomials);

// The single-edge formula with C(.) replaced by the falling factorial
// prod_{k=0}^{|V°_{T_v}|-2} (|V°| - j - k). Requires u = parent(v); used to
// cross-check the binomial form.
JointRankTable joint_rank_prob_falling_factorial(const PhyloTree& tree, VertexId u, VertexId v);

// P[r(u) < r(v)] for distinct interior u, v, in O(|V°|^2).
Rational compare(const PhyloTree& tree, VertexId u, VertexId v);
Rational compare(const PhyloTree& tree, VertexId u, VertexId v, const BinomialTable& binomials);

}  // namespace rankorder
