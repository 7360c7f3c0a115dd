#pragma once

#include <cstdint>
#include <vector>

namespace sieve {

// Number of ordered D-tuples of positive integers whose product is n.
// Throws DomainError for D < 1 or n < 1, BudgetError on uint64 overflow.
std::uint64_t tau(int D, std::uint64_t n);

// table[m] = tau(D, m) for m in [1, limit]; table[0] is unused and zero.
std::vector<std::uint64_t> tau_table(int D, std::uint64_t limit);

// Summatory divisor function: number of D-tuples with product <= x.
std::uint64_t big_t(int D, std::uint64_t x);

}  // namespace sieve
