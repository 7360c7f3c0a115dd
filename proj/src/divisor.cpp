#include "sieve/divisor.hpp"

#include <string>

#include "sieve/error.hpp"

namespace sieve {

namespace {

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    throw BudgetError("divisor count overflows 64-bit register");
  }
  return out;
}

void check_order(int D) {
  if (D < 1) throw DomainError("divisor order D must be >= 1, got " + std::to_string(D));
}

// Table sizes above this are refused rather than allocated.
constexpr std::uint64_t kMaxTableLimit = 200'000'000;

}  // namespace

std::uint64_t tau(int D, std::uint64_t n) {
  check_order(D);
  if (n < 1) throw DomainError("tau requires n >= 1");

  std::vector<std::uint64_t> divisors;
  std::vector<std::uint64_t> large;
  for (std::uint64_t f = 1; f * f <= n; ++f) {
    if (n % f != 0) continue;
    divisors.push_back(f);
    if (f != n / f) large.push_back(n / f);
  }
  divisors.insert(divisors.end(), large.rbegin(), large.rend());

  // tau_k over the divisor lattice of n: tau_k(e) = sum_{f | e} tau_{k-1}(f).
  std::vector<std::uint64_t> counts(divisors.size(), 1);
  for (int k = 2; k <= D; ++k) {
    std::vector<std::uint64_t> next(divisors.size(), 0);
    for (std::size_t a = 0; a < divisors.size(); ++a) {
      for (std::size_t b = 0; b <= a; ++b) {
        if (divisors[a] % divisors[b] == 0) next[a] = checked_add(next[a], counts[b]);
      }
    }
    counts = std::move(next);
  }
  return counts.back();
}

std::vector<std::uint64_t> tau_table(int D, std::uint64_t limit) {
  check_order(D);
  if (limit > kMaxTableLimit) throw BudgetError("tau_table limit too large");
  std::vector<std::uint64_t> table(limit + 1, 1);
  table[0] = 0;
  for (int k = 2; k <= D; ++k) {
    std::vector<std::uint64_t> next(limit + 1, 0);
    for (std::uint64_t f = 1; f <= limit; ++f) {
      for (std::uint64_t m = f; m <= limit; m += f) next[m] = checked_add(next[m], table[f]);
    }
    table = std::move(next);
  }
  return table;
}

std::uint64_t big_t(int D, std::uint64_t x) {
  check_order(D);
  if (x < 1) throw DomainError("big_t requires x >= 1");
  if (D == 1) return x;
  const auto table = tau_table(D, x);
  std::uint64_t total = 0;
  for (std::uint64_t m = 1; m <= x; ++m) total = checked_add(total, table[m]);
  return total;
}

}  // namespace sieve
