#include "rankorder/rank_inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "rankorder/errors.hpp"

namespace rankorder {

Rational RankDistribution::at(std::size_t rank) const {
  if (rank == 0 || rank > p.size()) return Rational(0);
  return p[rank - 1];
}

Rational JointRankTable::at(std::size_t i, std::size_t j) const {
  auto it = q.find({i, j});
  return it == q.end() ? Rational(0) : it->second;
}

std::size_t RankPath::total_interior() const {
  return std::accumulate(sibling_interior.begin(), sibling_interior.end(), base_interior) +
         sibling_interior.size();
}

RankPath rank_path(const PhyloTree& tree, VertexId v, VertexId top, std::optional<VertexId> pruned) {
  tree.check_interior(v);
  tree.check(top);
  if (top != v && !tree.is_ancestor(top, v)) {
    throw ContractError("'" + tree.name(top) + "' is not an ancestor of '" + tree.name(v) + "'");
  }
  RankPath path;
  path.base_interior = tree.interior_below(v);
  if (pruned) {
    if (!tree.is_ancestor(v, *pruned)) {
      throw ContractError("'" + tree.name(*pruned) + "' is not below '" + tree.name(v) + "'");
    }
    path.base_interior -= tree.interior_below(*pruned);
  }
  for (VertexId x = v; x != top;) {
    const VertexId up = *tree.parent(x);
    path.sibling_interior.push_back(tree.interior_below(up) - 1 - tree.interior_below(x));
    x = up;
  }
  return path;
}

namespace {

// Runs the rank recursion along `path`, handing every row to `on_row`.
//
// Row m holds the weight of v at rank i (1-based) inside the subtree of the
// m-th path vertex. Moving up one step with A interior vertices below and a
// sibling block of B: v at rank i - j - 1 before, with j of the block's
// vertices slotted among the i - 2 vertices preceding v (the new ancestor
// takes rank 1), and the rest of the block shuffled into the tail.
template <typename OnRow>
void run_rank_recursion(const RankPath& path, const BinomialTable& binom, OnRow&& on_row) {
  if (binom.max_n() < path.total_interior()) throw ContractError("binomial table too small");

  // Inside v's own subtree v always has rank 1.
  std::vector<BigCount> alpha(path.base_interior, BigCount(0));
  alpha[0] = 1;
  on_row(static_cast<const std::vector<BigCount>&>(alpha));
  long below = static_cast<long>(path.base_interior);  // A
  long step = 1;
  for (const auto sib : path.sibling_interior) {
    ++step;
    const long block = static_cast<long>(sib);  // B
    const long size = below + block + 1;
    std::vector<BigCount> next(static_cast<std::size_t>(size));
    for (long i = step; i <= size; ++i) {
      BigCount& acc = next[static_cast<std::size_t>(i - 1)];
      const long j_lo = std::max(0L, i - 1 - below);
      const long j_hi = std::min(block, i - 2);
      const long tail = below + block - (i - 1);
      for (long j = j_lo; j <= j_hi; ++j) {
        const long prev_rank = i - j - 1;
        const BigCount& a = alpha[static_cast<std::size_t>(prev_rank - 1)];
        if (a == 0) continue;
        acc += a * binom(tail, block - j) * binom(i - 2, j);
      }
    }
    alpha = std::move(next);
    below = size;
    on_row(static_cast<const std::vector<BigCount>&>(alpha));
  }
}

std::vector<Rational> normalize(const std::vector<BigCount>& weights) {
  BigCount sum = 0;
  for (const auto& w : weights) sum += w;
  if (sum == 0) throw Error("internal: rank weights sum to zero");
  std::vector<Rational> p;
  p.reserve(weights.size());
  for (const auto& w : weights) p.push_back(make_rational(w, sum));
  return p;
}

std::vector<VertexId> path_between(const PhyloTree& tree, VertexId ancestor, VertexId descendant) {
  std::vector<VertexId> down;
  for (VertexId x = descendant; x != ancestor; x = *tree.parent(x)) down.push_back(x);
  down.push_back(ancestor);
  std::reverse(down.begin(), down.end());
  return down;  // ancestor first
}

BinomialTable table_for(const PhyloTree& tree) { return BinomialTable(tree.interior_count() + 1); }

void check_pair(const PhyloTree& tree, VertexId u, VertexId v) {
  tree.check_interior(u);
  tree.check_interior(v);
  if (!tree.is_ancestor(u, v)) {
    throw ContractError("'" + tree.name(u) + "' is not a proper ancestor of '" + tree.name(v) + "'");
  }
}

}  // namespace

std::vector<BigCount> rank_weights(const RankPath& path, const BinomialTable& binomials) {
  std::vector<BigCount> last;
  run_rank_recursion(path, binomials, [&](const std::vector<BigCount>& row) { last = row; });
  return last;
}

AlphaTable alpha_table(const PhyloTree& tree, VertexId v) {
  const auto binom = table_for(tree);
  AlphaTable table{v, {}};
  run_rank_recursion(rank_path(tree, v, tree.root()), binom,
                     [&](const std::vector<BigCount>& row) { table.steps.push_back(row); });
  return table;
}

RankDistribution rank_probabilities(const PhyloTree& tree, VertexId v) {
  return rank_probabilities(tree, v, table_for(tree));
}

RankDistribution rank_probabilities(const PhyloTree& tree, VertexId v, const BinomialTable& binomials) {
  const auto weights = rank_weights(rank_path(tree, v, tree.root()), binomials);
  return RankDistribution{v, normalize(weights)};
}

std::vector<double> rank_probabilities_fp(const PhyloTree& tree, VertexId v) {
  const RankPath path = rank_path(tree, v, tree.root());
  const long total = static_cast<long>(path.total_interior());
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  auto log_binom = [](long n, long k) {
    if (k < 0 || k > n) return kNegInf;
    return std::lgamma(static_cast<double>(n + 1)) - std::lgamma(static_cast<double>(k + 1)) -
           std::lgamma(static_cast<double>(n - k + 1));
  };

  std::vector<double> alpha(static_cast<std::size_t>(total), kNegInf);
  std::vector<double> next(static_cast<std::size_t>(total), kNegInf);
  std::vector<double> terms;
  alpha[0] = 0.0;
  long below = static_cast<long>(path.base_interior);
  long step = 1;
  for (const auto sib : path.sibling_interior) {
    ++step;
    const long block = static_cast<long>(sib);
    const long size = below + block + 1;
    std::fill(next.begin(), next.begin() + size, kNegInf);
    for (long i = step; i <= size; ++i) {
      const long j_lo = std::max(0L, i - 1 - below);
      const long j_hi = std::min(block, i - 2);
      const long tail = below + block - (i - 1);
      terms.clear();
      double peak = kNegInf;
      for (long j = j_lo; j <= j_hi; ++j) {
        const double a = alpha[static_cast<std::size_t>(i - j - 2)];
        if (a == kNegInf) continue;
        const double t = a + log_binom(tail, block - j) + log_binom(i - 2, j);
        terms.push_back(t);
        peak = std::max(peak, t);
      }
      if (terms.empty()) continue;
      double s = 0.0;
      for (double t : terms) s += std::exp(t - peak);
      next[static_cast<std::size_t>(i - 1)] = peak + std::log(s);
    }
    // Rescale so the largest entry is log 1.
    const double top = *std::max_element(next.begin(), next.begin() + size);
    for (long i = 0; i < size; ++i) {
      alpha[static_cast<std::size_t>(i)] = next[static_cast<std::size_t>(i)] - top;
    }
    below = size;
  }

  std::vector<double> p(static_cast<std::size_t>(total));
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += p[i] = std::exp(alpha[i]);
  for (auto& x : p) x /= sum;
  return p;
}

RankSummary rank_moments(const RankDistribution& dist) {
  Rational mean = 0;
  Rational second = 0;
  for (std::size_t i = 1; i <= dist.size(); ++i) {
    const Rational& p = dist.p[i - 1];
    mean += p * static_cast<unsigned long>(i);
    second += p * static_cast<unsigned long>(i * i);
  }
  return RankSummary{mean, second - mean * mean};
}

JointRankTable joint_rank_prob(const PhyloTree& tree, VertexId u, VertexId v) {
  return joint_rank_prob(tree, u, v, table_for(tree));
}

JointRankTable joint_rank_prob(const PhyloTree& tree, VertexId u, VertexId v, const BinomialTable& binomials) {
  check_pair(tree, u, v);
  const auto path = path_between(tree, u, v);  // y_0 = u, ..., y_d = v
  const std::size_t d = path.size() - 1;
  const long all = static_cast<long>(tree.interior_count());

  // Rank weights of u in the tree with y_1's subtree cut back to a leaf.
  const auto u_weights = rank_weights(rank_path(tree, u, tree.root(), path[1]), binomials);
  const std::size_t u_ranks = u_weights.size();

  // joint[i - 1][r - 1]: weight of (r(u) = i, r(y_{k-1}) = r) in the tree
  // where y_k's subtree is cut back to a leaf. Starts as the diagonal (k = 1).
  std::vector<std::vector<BigCount>> joint(u_ranks, std::vector<BigCount>(static_cast<std::size_t>(all)));
  for (std::size_t i = 0; i < u_ranks; ++i) joint[i][i] = u_weights[i];

  long interior_now = all - static_cast<long>(tree.interior_below(path[1]));
  for (std::size_t k = 1; k <= d; ++k) {
    const long block = static_cast<long>(tree.interior_below(path[k])) -
                       (k < d ? static_cast<long>(tree.interior_below(path[k + 1])) : 0L);
    const long interior_next = interior_now + block;
    // y_k takes rank j: the first j - 1 ranks stay, y_{k-1} must be among
    // them, and the remaining interior_now - (j - 1) vertices shuffle with
    // the block's block - 1 non-root vertices.
    for (auto& row : joint) {
      BigCount prefix = 0;
      std::vector<BigCount> next(static_cast<std::size_t>(all));
      for (long j = 1; j <= std::min(interior_now + 1, interior_next); ++j) {
        if (j >= 2) prefix += row[static_cast<std::size_t>(j - 2)];
        if (prefix == 0) continue;
        next[static_cast<std::size_t>(j - 1)] = prefix * binomials(interior_next - j, block - 1);
      }
      row = std::move(next);
    }
    interior_now = interior_next;
  }

  BigCount sum = 0;
  for (const auto& row : joint)
    for (const auto& w : row) sum += w;
  if (sum == 0) throw Error("internal: joint rank weights sum to zero");

  JointRankTable out{u, v, {}};
  for (std::size_t i = 0; i < joint.size(); ++i) {
    for (std::size_t j = 0; j < joint[i].size(); ++j) {
      if (joint[i][j] != 0) out.q.emplace(std::pair{i + 1, j + 1}, make_rational(joint[i][j], sum));
    }
  }
  return out;
}

JointRankTable joint_rank_prob_falling_factorial(const PhyloTree& tree, VertexId u, VertexId v) {
  check_pair(tree, u, v);
  if (*tree.parent(v) != u) throw ContractError("falling-factorial form requires u = parent(v)");
  const auto binom = table_for(tree);
  const auto pu = normalize(rank_weights(rank_path(tree, u, tree.root(), v), binom));
  const long all = static_cast<long>(tree.interior_count());
  const long below_v = static_cast<long>(tree.interior_below(v));
  const long rest = all - below_v;  // |V°_{T_u}|

  std::map<std::pair<std::size_t, std::size_t>, Rational> raw;
  Rational sum = 0;
  for (std::size_t i = 1; i <= pu.size(); ++i) {
    if (pu[i - 1] == 0) continue;
    for (long j = static_cast<long>(i) + 1; j <= rest + 1; ++j) {
      BigCount falling = 1;
      for (long k = 0; k <= below_v - 2; ++k) falling *= all - j - k;
      if (falling == 0) continue;
      Rational w = pu[i - 1] * Rational(falling);
      sum += w;
      raw.emplace(std::pair{i, static_cast<std::size_t>(j)}, w);
    }
  }
  JointRankTable out{u, v, {}};
  for (auto& [key, w] : raw) out.q.emplace(key, w / sum);
  return out;
}

Rational compare(const PhyloTree& tree, VertexId u, VertexId v) {
  return compare(tree, u, v, table_for(tree));
}

Rational compare(const PhyloTree& tree, VertexId u, VertexId v, const BinomialTable& binomials) {
  tree.check_interior(u);
  tree.check_interior(v);
  if (u == v) throw ContractError("compare needs two distinct vertices");

  const VertexId split = mrca(tree, u, v);
  if (split == v) return Rational(0);
  if (split == u) return Rational(1);

  // Child subtrees of the split vertex holding u and v; any other children
  // of a polytomy are independent of the order of u and v and are dropped.
  auto child_toward = [&](VertexId x) {
    while (*tree.parent(x) != split) x = *tree.parent(x);
    return x;
  };
  const VertexId top_u = child_toward(u);
  const VertexId top_v = child_toward(v);

  const auto wu = rank_weights(rank_path(tree, u, top_u), binomials);
  const auto wv = rank_weights(rank_path(tree, v, top_v), binomials);
  const long a = static_cast<long>(wu.size());  // |V°_{T_u}|
  const long b = static_cast<long>(wv.size());  // |V°_{T_v}|

  // ucum(j) = sum_{k <= j} weight_u(k), unnormalized.
  std::vector<BigCount> ucum(static_cast<std::size_t>(a) + 1);
  for (long j = 1; j <= a; ++j) ucum[j] = ucum[j - 1] + wu[static_cast<std::size_t>(j - 1)];

  BigCount hits = 0;
  for (long i = 1; i <= b; ++i) {
    const BigCount& pv = wv[static_cast<std::size_t>(i - 1)];
    if (pv == 0) continue;
    for (long j = 1; j <= a; ++j) {
      hits += pv * binomials(i - 1 + j, j) * binomials(b - i + a - j, a - j) * ucum[j];
    }
  }
  const BigCount total = ucum[a] * [&] {
    BigCount s = 0;
    for (const auto& w : wv) s += w;
    return s;
  }() * binomials(a + b, b);
  return make_rational(hits, total);
}

}  // namespace rankorder
