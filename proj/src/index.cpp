#include "sieve/index.hpp"

#include <algorithm>
#include <limits>
#include <set>
#include <string>

#include "sieve/error.hpp"

namespace sieve {

namespace {

std::uint64_t row_product(std::span<const std::uint32_t> row) {
  std::uint64_t p = 1;
  for (std::uint32_t v : row) {
    if (__builtin_mul_overflow(p, static_cast<std::uint64_t>(v), &p)) {
      throw InputError("index row product overflows");
    }
  }
  return p;
}

void check_dims(int d, int d_prime) {
  if (d < 1) throw DomainError("dimension d must be >= 1");
  if (d_prime < 1) throw DomainError("working dimension D' must be >= 1");
  if (d_prime > d) {
    throw DomainError("working dimension D' (" + std::to_string(d_prime) +
                      ") exceeds d (" + std::to_string(d) + ")");
  }
}

void extend(std::uint64_t remaining, int slots, Factorization& prefix,
            std::vector<Factorization>& out) {
  if (remaining == 1) {
    out.push_back(prefix);
    return;
  }
  if (slots == 0) return;
  std::vector<std::uint64_t> small;
  std::vector<std::uint64_t> large;
  for (std::uint64_t f = 2; f * f <= remaining; ++f) {
    if (remaining % f != 0) continue;
    small.push_back(f);
    if (f * f != remaining) large.push_back(remaining / f);
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  small.push_back(remaining);
  for (std::uint64_t f : small) {
    prefix.push_back(static_cast<std::uint32_t>(f));
    extend(remaining / f, slots - 1, prefix, out);
    prefix.pop_back();
  }
}

}  // namespace

IndexMatrix::IndexMatrix(int d, int d_prime, std::vector<std::uint32_t> entries)
    : d_(d), d_prime_(d_prime), entries_(std::move(entries)) {
  if (d < 1 || d_prime < 1 || d_prime > d) {
    throw InputError("index matrix: invalid d / d_prime");
  }
  if (entries_.empty() || entries_.size() % static_cast<std::size_t>(d) != 0) {
    throw InputError("index matrix: entry count is not a positive multiple of d");
  }
  const std::size_t n_rows = entries_.size() / static_cast<std::size_t>(d);
  c_.reserve(n_rows);
  std::set<std::vector<std::uint32_t>> seen;
  for (std::size_t i = 0; i < n_rows; ++i) {
    auto r = row(i);
    int above_one = 0;
    for (std::uint32_t v : r) {
      if (v < 1) throw InputError("index matrix: entries must be >= 1");
      if (v > 1) ++above_one;
    }
    if (above_one > d_prime) {
      throw InputError("index matrix: row " + std::to_string(i + 1) + " has more than D' entries > 1");
    }
    const std::uint64_t p = row_product(r);
    if (i == 0 && p != 1) throw InputError("index matrix: first row must be all ones");
    if (i > 0 && p < c_.back()) {
      throw InputError("index matrix: row products must be non-decreasing (row " +
                       std::to_string(i + 1) + ")");
    }
    if (!seen.emplace(r.begin(), r.end()).second) {
      throw InputError("index matrix: duplicate row " + std::to_string(i + 1));
    }
    c_.push_back(p);
  }
}

IndexMatrix::IndexMatrix(Trusted, int d, int d_prime, std::vector<std::uint32_t> entries,
                         std::vector<std::uint64_t> c)
    : d_(d), d_prime_(d_prime), entries_(std::move(entries)), c_(std::move(c)) {}

std::uint32_t IndexMatrix::max_entry(int dim) const {
  std::uint32_t m = 1;
  for (std::size_t i = 0; i < rows(); ++i) m = std::max(m, entries_[i * d_ + dim]);
  return m;
}

IndexMatrix IndexMatrix::truncated(std::size_t count) const {
  if (count < 1 || count > rows()) throw DomainError("truncation count out of range");
  std::vector<std::uint32_t> e(entries_.begin(),
                               entries_.begin() + static_cast<std::ptrdiff_t>(count * d_));
  std::vector<std::uint64_t> c(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(count));
  return IndexMatrix(Trusted{}, d_, d_prime_, std::move(e), std::move(c));
}

std::vector<Factorization> factorizations(std::uint64_t product, int d_prime) {
  if (product < 1) throw DomainError("factorizations: product must be >= 1");
  if (d_prime < 1) throw DomainError("factorizations: D' must be >= 1");
  // Enumerating only factors >= 2 gives exactly the D'-tuple factorizations
  // with their ones dropped and duplicates merged.
  std::vector<Factorization> out;
  Factorization prefix;
  extend(product, d_prime, prefix, out);
  std::sort(out.begin(), out.end(), [](const Factorization& a, const Factorization& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

// Emits rows product block by product block, stopping at a row limit.
class IndexBuilder {
 public:
  IndexBuilder(int d, int d_prime, std::size_t row_limit, std::size_t entry_budget)
      : d_(d), d_prime_(d_prime), row_limit_(row_limit), budget_(entry_budget) {
    push(std::vector<std::uint32_t>(static_cast<std::size_t>(d), 1), 1);
  }

  bool full() const { return c_.size() >= row_limit_; }

  void add_product(std::uint64_t prod) {
    if (prod > std::numeric_limits<std::uint32_t>::max()) {
      throw BudgetError("index entries exceed 32-bit range");
    }
    for (const auto& g : factorizations(prod, d_prime_)) {
      const std::size_t m = g.size();
      if (m > static_cast<std::size_t>(d_)) continue;
      std::vector<int> pos(m);
      for (std::size_t k = 0; k < m; ++k) pos[k] = static_cast<int>(k);
      for (;;) {
        if (full()) return;
        std::vector<std::uint32_t> r(static_cast<std::size_t>(d_), 1);
        for (std::size_t k = 0; k < m; ++k) r[static_cast<std::size_t>(pos[k])] = g[k];
        push(r, prod);
        // next lexicographic combination
        int k = static_cast<int>(m) - 1;
        while (k >= 0 && pos[static_cast<std::size_t>(k)] == d_ - static_cast<int>(m) + k) --k;
        if (k < 0) break;
        ++pos[static_cast<std::size_t>(k)];
        for (std::size_t t = static_cast<std::size_t>(k) + 1; t < m; ++t) pos[t] = pos[t - 1] + 1;
      }
    }
  }

  IndexMatrix finish() && {
    return IndexMatrix(IndexMatrix::Trusted{}, d_, d_prime_, std::move(entries_), std::move(c_));
  }

 private:
  void push(const std::vector<std::uint32_t>& r, std::uint64_t prod) {
    if (entries_.size() + r.size() > budget_) {
      throw BudgetError("index matrix exceeds entry budget of " + std::to_string(budget_));
    }
    entries_.insert(entries_.end(), r.begin(), r.end());
    c_.push_back(prod);
  }

  int d_;
  int d_prime_;
  std::size_t row_limit_;
  std::size_t budget_;
  std::vector<std::uint32_t> entries_;
  std::vector<std::uint64_t> c_;
};

IndexMatrix generate_index_matrix(int d, int d_prime, std::uint64_t prod_max,
                                  std::size_t entry_budget) {
  check_dims(d, d_prime);
  if (prod_max < 1) throw DomainError("prod_max must be >= 1");
  IndexBuilder b(d, d_prime, std::numeric_limits<std::size_t>::max(), entry_budget);
  for (std::uint64_t p = 2; p <= prod_max; ++p) b.add_product(p);
  return std::move(b).finish();
}

IndexMatrix index_matrix_for_count(int d, int d_prime, std::size_t count,
                                   std::size_t entry_budget) {
  check_dims(d, d_prime);
  if (count < 1) throw DomainError("basis count must be >= 1");
  if (count > entry_budget / static_cast<std::size_t>(d)) {
    throw BudgetError("requested " + std::to_string(count) + " rows exceed entry budget of " +
                      std::to_string(entry_budget));
  }
  IndexBuilder b(d, d_prime, count, entry_budget);
  for (std::uint64_t p = 2; !b.full(); ++p) b.add_product(p);
  return std::move(b).finish();
}

}  // namespace sieve
