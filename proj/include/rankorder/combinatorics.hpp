#pragma once

#include <cstddef>
#include <vector>

#include "rankorder/numeric.hpp"
#include "rankorder/tree.hpp"

namespace rankorder {

// Pascal's triangle of C(n, k) for 0 <= k <= n <= N, built once in O(N^2)
// additions. Lookups outside the triangle return 0.
class BinomialTable {
 public:
  explicit BinomialTable(std::size_t max_n);

  std::size_t max_n() const { return max_n_; }

  // C(n, k); zero when k > n or either argument is negative.
  // Throws ContractError if n > max_n().
  const BigCount& operator()(long n, long k) const;

 private:
  std::size_t max_n_;
  std::vector<BigCount> rows_;  // row n starts at n(n+1)/2
  BigCount zero_{0};
};

BinomialTable binomial_table(std::size_t max_n);

// Exact C(n, k) without a table.
BigCount binomial(unsigned long n, unsigned long k);
BigCount factorial(unsigned long n);

// |r(T)|, the number of rank functions (linear extensions of the ancestor
// order on interior vertices): |V°|! / prod_v interior_below(v). On binary
// trees interior_below(v) = n_v - 1. Throws ContractError when the tree has
// no interior vertex.
BigCount count_rank_functions(const PhyloTree& tree);

// Yule probability of any single ranking of this topology:
// prod_v (n_v - 1) / (n - 1)!. Binary trees only.
Rational yule_ranked_prob(const PhyloTree& tree);

// Yule probability of the leaf-labelled topology:
// 2^(n-1) / (n! prod_v (n_v - 1)). Binary trees only.
Rational yule_topology_prob(const PhyloTree& tree);

// (2k-1)!! = 1 * 3 * ... * (2k-1); (2*(-1)-1)!! taken as 1.
BigCount double_factorial_odd(long k);

}  // namespace rankorder
