#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sieve {

// Default cap on rows * d entries for a generated index matrix.
inline constexpr std::size_t kDefaultEntryBudget = 50'000'000;

// Ordered list of d-tuples naming the product basis functions
// psi_j(x) = prod_k phi_{row_j[k]}(x[k]). Rows are sorted by their product
// c_j (non-decreasing); row 0 is all ones; each row has at most d_prime
// entries greater than one. Immutable once built.
class IndexMatrix {
 public:
  // Validates every invariant; throws InputError on violation.
  IndexMatrix(int d, int d_prime, std::vector<std::uint32_t> entries);

  int d() const { return d_; }
  int d_prime() const { return d_prime_; }
  std::size_t rows() const { return c_.size(); }

  std::span<const std::uint32_t> row(std::size_t i) const {
    return {entries_.data() + i * static_cast<std::size_t>(d_), static_cast<std::size_t>(d_)};
  }
  std::uint64_t c(std::size_t i) const { return c_[i]; }
  std::span<const std::uint64_t> c_values() const { return c_; }
  std::span<const std::uint32_t> entries() const { return entries_; }

  // Largest univariate frequency index used in column `dim`.
  std::uint32_t max_entry(int dim) const;

  // Leading `count` rows. count must be in [1, rows()].
  IndexMatrix truncated(std::size_t count) const;

  friend bool operator==(const IndexMatrix& a, const IndexMatrix& b) {
    return a.d_ == b.d_ && a.d_prime_ == b.d_prime_ && a.entries_ == b.entries_;
  }

 private:
  struct Trusted {};
  IndexMatrix(Trusted, int d, int d_prime, std::vector<std::uint32_t> entries,
              std::vector<std::uint64_t> c);

  friend class IndexBuilder;

  int d_ = 0;
  int d_prime_ = 0;
  std::vector<std::uint32_t> entries_;
  std::vector<std::uint64_t> c_;
};

using Factorization = std::vector<std::uint32_t>;

// All distinct ordered tuples of factors >= 2 with length <= d_prime whose
// product is `product`. product == 1 yields a single empty tuple.
// Order: shorter tuples first, then lexicographic, so 6 with d_prime = 2
// gives [6], [2,3], [3,2].
std::vector<Factorization> factorizations(std::uint64_t product, int d_prime);

// Rows for every product value 1..prod_max. Within a product value, each
// factorization (in the order above) is written into every increasing
// choice of positions, positions enumerated lexicographically.
IndexMatrix generate_index_matrix(int d, int d_prime, std::uint64_t prod_max,
                                  std::size_t entry_budget = kDefaultEntryBudget);

// The first `count` rows of the same ordering.
IndexMatrix index_matrix_for_count(int d, int d_prime, std::size_t count,
                                   std::size_t entry_budget = kDefaultEntryBudget);

}  // namespace sieve
