#include "rankorder/combinatorics.hpp"

#include <string>

#include "rankorder/errors.hpp"

namespace rankorder {

BinomialTable::BinomialTable(std::size_t max_n) : max_n_(max_n) {
  rows_.resize((max_n + 1) * (max_n + 2) / 2);
  for (std::size_t n = 0; n <= max_n; ++n) {
    const std::size_t row = n * (n + 1) / 2;
    rows_[row] = 1;
    rows_[row + n] = 1;
    const std::size_t prev = row - n;  // start of row n-1
    for (std::size_t k = 1; k < n; ++k) rows_[row + k] = rows_[prev + k - 1] + rows_[prev + k];
  }
}

const BigCount& BinomialTable::operator()(long n, long k) const {
  if (n < 0 || k < 0 || k > n) return zero_;
  if (static_cast<std::size_t>(n) > max_n_) {
    throw ContractError("binomial C(" + std::to_string(n) + ", .) outside table of size " +
                        std::to_string(max_n_));
  }
  const auto un = static_cast<std::size_t>(n);
  return rows_[un * (un + 1) / 2 + static_cast<std::size_t>(k)];
}

BinomialTable binomial_table(std::size_t max_n) { return BinomialTable(max_n); }

BigCount binomial(unsigned long n, unsigned long k) {
  BigCount r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

BigCount factorial(unsigned long n) {
  BigCount r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

BigCount double_factorial_odd(long k) {
  BigCount r = 1;
  for (long m = 1; m <= 2 * k - 1; m += 2) r *= m;
  return r;
}

BigCount count_rank_functions(const PhyloTree& tree) {
  const auto interior = tree.interior_count();
  if (interior == 0) throw ContractError("tree has no interior vertex");
  BigCount denominator = 1;
  for (auto v : tree.interior_vertices()) denominator *= static_cast<unsigned long>(tree.interior_below(v));
  const BigCount numerator = factorial(interior);
  BigCount quotient;
  BigCount remainder;
  mpz_tdiv_qr(quotient.get_mpz_t(), remainder.get_mpz_t(), numerator.get_mpz_t(), denominator.get_mpz_t());
  if (remainder != 0) throw Error("internal: rank-function count is not an integer");
  return quotient;
}

namespace {

void require_binary(const PhyloTree& tree, const char* what) {
  if (!is_binary(tree)) throw ContractError(std::string(what) + " requires a binary tree");
  if (tree.interior_count() == 0) throw ContractError(std::string(what) + " requires an interior vertex");
}

BigCount product_of_leaf_counts_minus_one(const PhyloTree& tree) {
  BigCount p = 1;
  for (auto v : tree.interior_vertices()) p *= static_cast<unsigned long>(tree.leaves_below(v) - 1);
  return p;
}

}  // namespace

Rational yule_ranked_prob(const PhyloTree& tree) {
  require_binary(tree, "yule_ranked_prob");
  return make_rational(product_of_leaf_counts_minus_one(tree), factorial(tree.leaf_count() - 1));
}

Rational yule_topology_prob(const PhyloTree& tree) {
  require_binary(tree, "yule_topology_prob");
  const auto n = tree.leaf_count();
  BigCount numerator;
  mpz_ui_pow_ui(numerator.get_mpz_t(), 2, n - 1);
  return make_rational(numerator, factorial(n) * product_of_leaf_counts_minus_one(tree));
}

}  // namespace rankorder
