#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankorder/numeric.hpp"

namespace rankorder {

// Dense 0-based vertex index. Vertices of a PhyloTree are numbered in
// preorder (children visited in input order), so ids are deterministic for a
// given Newick text.
struct VertexId {
  std::uint32_t index = 0;

  constexpr auto operator<=>(const VertexId&) const = default;
};

// Immutable rooted tree topology with cached subtree counts.
//
// Invariants enforced at construction: a single root, leaves have no
// children, interior vertices have at least two children, labels are unique.
class PhyloTree {
 public:
  // Construction input: a node list in any order, children referring to
  // positions in the list.
  struct Node {
    std::optional<std::string> label;
    std::vector<std::size_t> children;
  };

  // Validates and renumbers `nodes` into preorder. Throws ContractError.
  // If `ids` is given it receives the new id of every input position.
  static PhyloTree from_nodes(const std::vector<Node>& nodes, std::size_t root,
                              std::vector<VertexId>* ids = nullptr);

  std::size_t vertex_count() const { return parent_.size(); }
  std::size_t leaf_count() const { return leaves_below_[0]; }
  std::size_t interior_count() const { return interior_below_[0]; }

  VertexId root() const { return VertexId{0}; }
  std::span<const VertexId> children(VertexId v) const;
  std::optional<VertexId> parent(VertexId v) const;
  bool is_leaf(VertexId v) const { return children(v).empty(); }

  const std::optional<std::string>& label(VertexId v) const;
  // Label if present, otherwise "#k" with k the preorder index.
  std::string name(VertexId v) const;
  std::optional<VertexId> find(std::string_view name) const;
  // Like find(), but throws ContractError("unknown vertex ...").
  VertexId vertex(std::string_view name) const;

  // n_v: leaves in the subtree at v (1 for a leaf).
  std::size_t leaves_below(VertexId v) const;
  // Interior vertices in the subtree at v, v included when interior.
  std::size_t interior_below(VertexId v) const;
  std::size_t subtree_size(VertexId v) const;

  // True iff a is a proper ancestor of b.
  bool is_ancestor(VertexId a, VertexId b) const;
  bool contains(VertexId v) const { return v.index < vertex_count(); }
  // Throws ContractError if v is not a vertex of this tree.
  void check(VertexId v) const;
  // Throws ContractError if v is a leaf or unknown.
  void check_interior(VertexId v) const;

  std::vector<VertexId> vertices() const;
  std::vector<VertexId> interior_vertices() const;
  std::vector<VertexId> leaves() const;

  // Equality of structure and labels, including child order.
  bool operator==(const PhyloTree& other) const;

 private:
  PhyloTree() = default;

  std::vector<std::uint32_t> parent_;  // root holds kNoParent
  std::vector<std::uint32_t> child_offset_;
  std::vector<VertexId> child_list_;
  std::vector<std::optional<std::string>> label_;
  std::vector<std::size_t> leaves_below_;
  std::vector<std::size_t> interior_below_;
  std::vector<std::size_t> subtree_size_;
  std::map<std::string, VertexId, std::less<>> by_label_;

  static constexpr std::uint32_t kNoParent = UINT32_MAX;
};

// Accepted grammar:
//   tree    := subtree ';'
//   subtree := label | '(' subtree (',' subtree)+ ')' [label] [':' number]
// (leaves may also carry ':' number). Labels are bare (no whitespace or
// "(),:;'[]") or single-quoted with '' as an escaped quote. Branch lengths
// are parsed and discarded. Throws ParseError or ContractError.
PhyloTree parse_newick(std::string_view text);

// Edge lengths keyed by the child vertex of each edge.
using EdgeLengths = std::map<VertexId, Rational>;

std::string write_newick(const PhyloTree& tree);
// Every non-root vertex must have a length; rendered with
// `significant_digits` significant digits. Throws ContractError otherwise.
std::string write_newick(const PhyloTree& tree, const EdgeLengths& lengths, int significant_digits);
// Annotates only the edges present in `lengths`.
std::string write_newick_partial(const PhyloTree& tree, const EdgeLengths& lengths, int significant_digits);

// Deepest vertex that is an ancestor of, or equal to, both a and b.
VertexId mrca(const PhyloTree& tree, VertexId a, VertexId b);

bool is_binary(const PhyloTree& tree);

// Children of every vertex reordered by `order(v, k)` (a permutation of
// 0..k-1 for a vertex with k children). `ids`, when given, maps old vertex
// indices to the new ids.
template <typename Permute>
PhyloTree permute_children(const PhyloTree& tree, Permute&& order, std::vector<VertexId>* ids = nullptr) {
  std::vector<PhyloTree::Node> nodes(tree.vertex_count());
  for (auto v : tree.vertices()) {
    nodes[v.index].label = tree.label(v);
    auto kids = tree.children(v);
    std::vector<std::size_t> perm = order(v, kids.size());
    for (auto k : perm) nodes[v.index].children.push_back(kids[k].index);
  }
  return PhyloTree::from_nodes(nodes, tree.root().index, ids);
}

}  // namespace rankorder
