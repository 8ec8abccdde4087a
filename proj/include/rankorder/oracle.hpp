#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <vector>

#include "rankorder/numeric.hpp"
#include "rankorder/rank_inference.hpp"
#include "rankorder/tree.hpp"

namespace rankorder {

// One linear extension of the ancestor order on interior vertices.
struct RankFunction {
  // order[k] has rank k + 1.
  std::vector<VertexId> order;
  // rank_of[v.index]: 1-based rank, 0 for leaves.
  std::vector<std::size_t> rank_of;

  std::size_t rank(VertexId v) const { return rank_of.at(v.index); }
  bool operator==(const RankFunction& other) const { return order == other.order; }
  bool operator<(const RankFunction& other) const { return order < other.order; }
};

// Checks bijectivity onto 1..|V°| and that every ancestor ranks first.
bool is_valid_rank_function(const PhyloTree& tree, const RankFunction& r);

constexpr std::size_t kDefaultEnumerationLimit = 10;

// Every rank function exactly once, in lexicographic order of the vertex
// sequence. Throws EnumerationLimitError when |V°| exceeds `limit`.
std::vector<RankFunction> enumerate_rank_functions(const PhyloTree& tree,
                                                   std::size_t limit = kDefaultEnumerationLimit);

// Frequency counting over the enumeration.
RankDistribution brute_rank_probabilities(const PhyloTree& tree, VertexId v,
                                          std::size_t limit = kDefaultEnumerationLimit);
Rational brute_compare(const PhyloTree& tree, VertexId u, VertexId v, std::size_t limit = kDefaultEnumerationLimit);
JointRankTable brute_joint(const PhyloTree& tree, VertexId u, VertexId v,
                           std::size_t limit = kDefaultEnumerationLimit);

// Generator used by every sampler. Draws are taken from the raw 64-bit
// output only, so sequences are identical across standard libraries.
using Rng = std::mt19937_64;

// Uniform integer in [0, bound), bound > 0, by rejection.
std::uint64_t uniform_below(Rng& rng, std::uint64_t bound);
// Uniform double in [0, 1) with 53 random bits.
double uniform_unit(Rng& rng);

// Uniform rank function: each subtree's order is sampled recursively and
// sibling orders are merged by a uniformly random interleaving.
RankFunction sample_rank_function(const PhyloTree& tree, Rng& rng);
RankFunction sample_rank_function(const PhyloTree& tree, std::uint64_t seed);

// Rate-1 Yule event times consistent with `rank` (exponential waits with
// mean 1/(k+1) after the k-th event), stopped at event n - 1. Returns the
// duration of the edge above each non-root vertex.
std::map<VertexId, double> sample_yule_times(const PhyloTree& tree, const RankFunction& rank, Rng& rng);
std::map<VertexId, double> sample_yule_times(const PhyloTree& tree, const RankFunction& rank, std::uint64_t seed);

}  // namespace rankorder
