#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rankorder/numeric.hpp"
#include "rankorder/tree.hpp"

namespace rankorder {

// Inter-event waiting times. Yule: rate-1 pure birth, so the wait from the
// k-th to the (k+1)-th event is 1/(k+1). Coalescent: standard units, the
// corresponding increment is 1/((k+1)k).
enum class TimingModel { Yule, Coalescent };

std::string_view to_string(TimingModel model);
// "yule" or "coalescent"; throws ContractError otherwise.
TimingModel parse_timing_model(std::string_view text);

// Expected edge lengths; every map is keyed by the child vertex of the edge.
struct EdgeLengthReport {
  TimingModel model = TimingModel::Yule;
  std::map<VertexId, Rational> interior;
  // Yule only, filled when pendant edges were requested.
  std::map<VertexId, Rational> pendant;
  // Root-to-leaf path sums; only present together with pendant lengths.
  std::map<VertexId, Rational> leaf_depths;

  // interior and pendant merged, for Newick output.
  EdgeLengths all_edges() const;
};

constexpr std::size_t kDefaultMaxResolutions = 10000;

// Binary refinements of a tree with polytomies, each weighted by its Yule
// topology probability.
struct ResolutionSet {
  struct Resolution {
    PhyloTree tree;
    Rational weight;
    // source vertex index -> vertex in this resolution
    std::vector<VertexId> correspondence;
  };

  PhyloTree source;
  std::vector<Resolution> resolutions;

  Rational total_weight() const;
};

// E[length | r(u) = i, r(v) = j] = sum_{k=1}^{j-i} w(i + k), with
// w(m) = 1/m (Yule) or 1/(m(m-1)) (coalescent). Requires 1 <= i < j.
Rational expected_waiting_sum(std::size_t i, std::size_t j, TimingModel model);

// Expected length of the interior edge (u, v), u = parent(v), binary tree.
Rational interior_edge_length(const PhyloTree& tree, VertexId u, VertexId v, TimingModel model);

// Expected Yule length of a pendant edge below interior vertex v when the
// process stops at the (n-1)-th speciation event:
// sum_i P[r(v) = i] sum_{k=i}^{n-2} 1/(k+1). Binary trees only.
Rational pendant_edge_length(const PhyloTree& tree, VertexId v);

// Every interior edge of a binary tree; with include_pendant (Yule only)
// also pendant edges and leaf depths.
EdgeLengthReport date_tree(const PhyloTree& tree, TimingModel model, bool include_pendant);

// As above, but a non-binary tree is dated through its binary resolutions
// (at most max_resolutions of them). Pendant edges are rejected for
// non-binary input.
EdgeLengthReport date_tree(const PhyloTree& tree, TimingModel model, bool include_pendant,
                           std::size_t max_resolutions);

// Exact number of binary resolutions: product over vertices with d children
// of (2d - 3)!!.
BigCount count_resolutions(const PhyloTree& tree);

// All binary resolutions. Throws ResolutionLimitError (carrying the exact
// count) when there are more than max_resolutions.
ResolutionSet resolve_polytomies(const PhyloTree& tree, std::size_t max_resolutions = kDefaultMaxResolutions);

// Weighted average over resolutions of the summed expected lengths along the
// u -> v path. v must be interior.
Rational polytomy_edge_length(const PhyloTree& tree, VertexId u, VertexId v, TimingModel model,
                              std::size_t max_resolutions = kDefaultMaxResolutions);

// Newick with every edge annotated. The report must cover all edges.
std::string write_newick(const PhyloTree& tree, const EdgeLengthReport& report, int significant_digits);

}  // namespace rankorder
