#pragma once

#include <cstddef>
#include <functional>

namespace sieve {

// Upper bound on worker threads used by the library. 0 means "unset": the
// value of SIEVE_THREADS is used if present, else hardware concurrency.
void set_max_threads(std::size_t n);
std::size_t max_threads();

// Runs body(i) for i in [0, count). Work items are claimed dynamically but
// each index runs exactly once, so results written by index are independent
// of the thread count. The first exception thrown is rethrown on the caller.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace sieve
