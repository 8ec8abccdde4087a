#include "rankorder/branch_timing.hpp"

#include <array>
#include <string>

#include "rankorder/combinatorics.hpp"
#include "rankorder/errors.hpp"
#include "rankorder/rank_inference.hpp"

namespace rankorder {

std::string_view to_string(TimingModel model) {
  return model == TimingModel::Yule ? "yule" : "coalescent";
}

TimingModel parse_timing_model(std::string_view text) {
  if (text == "yule") return TimingModel::Yule;
  if (text == "coalescent") return TimingModel::Coalescent;
  throw ContractError("unknown model '" + std::string(text) + "' (expected yule or coalescent)");
}

EdgeLengths EdgeLengthReport::all_edges() const {
  EdgeLengths out = interior;
  out.insert(pendant.begin(), pendant.end());
  return out;
}

Rational ResolutionSet::total_weight() const {
  Rational sum = 0;
  for (const auto& r : resolutions) sum += r.weight;
  return sum;
}

namespace {

// Expected wait between the (m-1)-th and m-th event, m >= 2.
Rational step_wait(std::size_t m, TimingModel model) {
  if (model == TimingModel::Yule) return Rational(1, static_cast<unsigned long>(m));
  return Rational(1, static_cast<unsigned long>(m * (m - 1)));
}

// cumulative[m] = sum_{k=2}^{m} step_wait(k), so the expected time between
// ranks i and j is cumulative[j] - cumulative[i].
std::vector<Rational> cumulative_waits(std::size_t max_rank, TimingModel model) {
  std::vector<Rational> c(max_rank + 1, Rational(0));
  for (std::size_t m = 2; m <= max_rank; ++m) c[m] = c[m - 1] + step_wait(m, model);
  return c;
}

void require_binary(const PhyloTree& tree, const char* what) {
  if (!is_binary(tree)) throw ContractError(std::string(what) + " requires a binary tree");
}

void require_edge(const PhyloTree& tree, VertexId u, VertexId v) {
  tree.check(u);
  tree.check(v);
  if (tree.parent(v) != u) {
    throw ContractError("'" + tree.name(u) + "' is not the parent of '" + tree.name(v) + "'");
  }
}

Rational edge_length_from_joint(const JointRankTable& joint, const std::vector<Rational>& cumulative) {
  Rational e = 0;
  for (const auto& [key, q] : joint.q) e += q * (cumulative[key.second] - cumulative[key.first]);
  return e;
}

Rational pendant_from_distribution(const RankDistribution& dist, std::size_t leaves) {
  // sum_{k=i}^{n-2} 1/(k+1) = H(n-1) - H(i)
  std::vector<Rational> harmonic(leaves, Rational(0));
  for (std::size_t k = 1; k < leaves; ++k) harmonic[k] = harmonic[k - 1] + Rational(1, static_cast<unsigned long>(k));
  Rational e = 0;
  for (std::size_t i = 1; i <= dist.size(); ++i) {
    if (dist.p[i - 1] == 0) continue;
    e += dist.p[i - 1] * (harmonic[leaves - 1] - harmonic[i]);
  }
  return e;
}

// Internal vertex of a local binary shape: entries >= 0 are other internal
// vertices of the shape, entries < 0 encode slot s as -(s + 1).
struct LocalShape {
  std::vector<std::array<int, 2>> kids;
  int root = 0;
};

// All rooted binary shapes on `slots` labelled slots, by inserting slot k
// above each of the 2k - 1 existing elements in turn.
std::vector<LocalShape> local_shapes(int slots) {
  std::vector<LocalShape> shapes{LocalShape{{{-1, -2}}, 0}};
  for (int k = 2; k < slots; ++k) {
    std::vector<LocalShape> grown;
    for (const auto& shape : shapes) {
      std::vector<int> elements;
      for (int x = 0; x < static_cast<int>(shape.kids.size()); ++x) elements.push_back(x);
      for (int s = 0; s < k; ++s) elements.push_back(-(s + 1));
      for (int x : elements) {
        LocalShape next = shape;
        const int fresh = static_cast<int>(next.kids.size());
        next.kids.push_back({x, -(k + 1)});
        if (next.root == x) {
          next.root = fresh;
        } else {
          for (int y = 0; y < fresh; ++y)
            for (auto& c : next.kids[y])
              if (c == x) c = fresh;
        }
        grown.push_back(std::move(next));
      }
    }
    shapes = std::move(grown);
  }
  return shapes;
}

std::vector<VertexId> path_to(const PhyloTree& tree, VertexId ancestor, VertexId v) {
  std::vector<VertexId> down;
  for (VertexId x = v; x != ancestor; x = *tree.parent(x)) down.push_back(x);
  return down;  // child vertices of every edge on the path
}

}  // namespace

Rational expected_waiting_sum(std::size_t i, std::size_t j, TimingModel model) {
  if (i < 1 || i >= j) throw ContractError("expected_waiting_sum requires 1 <= i < j");
  Rational sum = 0;
  for (std::size_t m = i + 1; m <= j; ++m) sum += step_wait(m, model);
  return sum;
}

Rational interior_edge_length(const PhyloTree& tree, VertexId u, VertexId v, TimingModel model) {
  require_binary(tree, "interior_edge_length");
  require_edge(tree, u, v);
  if (tree.is_leaf(v)) throw ContractError("'" + tree.name(v) + "' is a leaf; use pendant_edge_length");
  const auto joint = joint_rank_prob(tree, u, v);
  return edge_length_from_joint(joint, cumulative_waits(tree.interior_count(), model));
}

Rational pendant_edge_length(const PhyloTree& tree, VertexId v) {
  require_binary(tree, "pendant_edge_length");
  tree.check_interior(v);
  bool has_leaf = false;
  for (auto c : tree.children(v)) has_leaf |= tree.is_leaf(c);
  if (!has_leaf) throw ContractError("'" + tree.name(v) + "' has no leaf child");
  return pendant_from_distribution(rank_probabilities(tree, v), tree.leaf_count());
}

EdgeLengthReport date_tree(const PhyloTree& tree, TimingModel model, bool include_pendant) {
  require_binary(tree, "date_tree");
  if (include_pendant && model == TimingModel::Coalescent) {
    throw ContractError("pendant edge lengths are only defined under the Yule model");
  }
  if (tree.interior_count() == 0) throw ContractError("tree has no interior vertex");

  EdgeLengthReport report;
  report.model = model;
  const BinomialTable binom(tree.interior_count() + 1);
  const auto cumulative = cumulative_waits(tree.interior_count(), model);
  for (auto v : tree.interior_vertices()) {
    if (v == tree.root()) continue;
    report.interior.emplace(v, edge_length_from_joint(joint_rank_prob(tree, *tree.parent(v), v, binom), cumulative));
  }
  if (!include_pendant) return report;

  for (auto v : tree.interior_vertices()) {
    std::optional<Rational> length;
    for (auto c : tree.children(v)) {
      if (!tree.is_leaf(c)) continue;
      if (!length) length = pendant_from_distribution(rank_probabilities(tree, v, binom), tree.leaf_count());
      report.pendant.emplace(c, *length);
    }
  }
  // Preorder ids: a parent's depth is known before its children's.
  std::vector<Rational> depth(tree.vertex_count(), Rational(0));
  for (auto v : tree.vertices()) {
    if (v == tree.root()) continue;
    const auto& edges = tree.is_leaf(v) ? report.pendant : report.interior;
    depth[v.index] = depth[tree.parent(v)->index] + edges.at(v);
    if (tree.is_leaf(v)) report.leaf_depths.emplace(v, depth[v.index]);
  }
  return report;
}

BigCount count_resolutions(const PhyloTree& tree) {
  BigCount count = 1;
  for (auto v : tree.interior_vertices()) {
    const long d = static_cast<long>(tree.children(v).size());
    count *= double_factorial_odd(d - 1);  // (2d - 3)!!
  }
  return count;
}

ResolutionSet resolve_polytomies(const PhyloTree& tree, std::size_t max_resolutions) {
  const BigCount count = count_resolutions(tree);
  if (count > max_resolutions) throw ResolutionLimitError(count.get_str(), max_resolutions);

  std::vector<VertexId> polytomies;
  std::vector<std::vector<LocalShape>> choices;
  for (auto v : tree.interior_vertices()) {
    const auto d = tree.children(v).size();
    if (d > 2) {
      polytomies.push_back(v);
      choices.push_back(local_shapes(static_cast<int>(d)));
    }
  }

  ResolutionSet set{tree, {}};
  std::vector<std::size_t> pick(polytomies.size(), 0);
  for (;;) {
    std::vector<PhyloTree::Node> nodes(tree.vertex_count());
    for (auto v : tree.vertices()) {
      nodes[v.index].label = tree.label(v);
      for (auto c : tree.children(v)) nodes[v.index].children.push_back(c.index);
    }
    for (std::size_t p = 0; p < polytomies.size(); ++p) {
      const VertexId v = polytomies[p];
      const auto& shape = choices[p][pick[p]];
      const auto kids = tree.children(v);
      // Shape vertex x lives at node_of[x]; the shape root reuses v itself.
      std::vector<std::size_t> node_of(shape.kids.size());
      for (std::size_t x = 0; x < shape.kids.size(); ++x) {
        if (static_cast<int>(x) == shape.root) {
          node_of[x] = v.index;
        } else {
          node_of[x] = nodes.size();
          nodes.emplace_back();
        }
      }
      for (std::size_t x = 0; x < shape.kids.size(); ++x) {
        auto& out = nodes[node_of[x]].children;
        out.clear();
        for (int c : shape.kids[x]) {
          out.push_back(c >= 0 ? node_of[static_cast<std::size_t>(c)] : kids[static_cast<std::size_t>(-c - 1)].index);
        }
      }
    }
    std::vector<VertexId> ids;
    PhyloTree resolved = PhyloTree::from_nodes(nodes, tree.root().index, &ids);
    ids.resize(tree.vertex_count());
    Rational weight = yule_topology_prob(resolved);
    set.resolutions.push_back({std::move(resolved), std::move(weight), std::move(ids)});

    std::size_t p = 0;
    while (p < pick.size() && ++pick[p] == choices[p].size()) pick[p++] = 0;
    if (p == pick.size()) break;
  }
  return set;
}

Rational polytomy_edge_length(const PhyloTree& tree, VertexId u, VertexId v, TimingModel model,
                              std::size_t max_resolutions) {
  require_edge(tree, u, v);
  if (tree.is_leaf(v)) {
    throw ContractError("'" + tree.name(v) + "' is a leaf; pendant edges are not averaged over resolutions");
  }
  const auto set = resolve_polytomies(tree, max_resolutions);
  Rational weighted = 0;
  for (const auto& r : set.resolutions) {
    const VertexId ru = r.correspondence[u.index];
    Rational path_sum = 0;
    for (auto x : path_to(r.tree, ru, r.correspondence[v.index])) {
      path_sum += interior_edge_length(r.tree, *r.tree.parent(x), x, model);
    }
    weighted += path_sum * r.weight;
  }
  return weighted / set.total_weight();
}

EdgeLengthReport date_tree(const PhyloTree& tree, TimingModel model, bool include_pendant,
                           std::size_t max_resolutions) {
  if (is_binary(tree)) return date_tree(tree, model, include_pendant);
  if (include_pendant) throw ContractError("pendant edge lengths require a binary tree");

  const auto set = resolve_polytomies(tree, max_resolutions);
  EdgeLengthReport report;
  report.model = model;
  for (auto v : tree.interior_vertices()) {
    if (v != tree.root()) report.interior.emplace(v, Rational(0));
  }
  for (const auto& r : set.resolutions) {
    const auto dated = date_tree(r.tree, model, false);
    for (auto& [v, total] : report.interior) {
      Rational path_sum = 0;
      for (auto x : path_to(r.tree, r.correspondence[tree.parent(v)->index], r.correspondence[v.index])) {
        path_sum += dated.interior.at(x);
      }
      total += path_sum * r.weight;
    }
  }
  const Rational norm = set.total_weight();
  for (auto& [v, total] : report.interior) total /= norm;
  return report;
}

std::string write_newick(const PhyloTree& tree, const EdgeLengthReport& report, int significant_digits) {
  return write_newick(tree, report.all_edges(), significant_digits);
}

}  // namespace rankorder
