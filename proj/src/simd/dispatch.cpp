#include <atomic>
#include <cstdlib>
#include <string>

#include "sieve/error.hpp"
#include "sieve/simd.hpp"

namespace sieve::simd {

namespace detail {
#if !defined(SIEVE_HAVE_AVX2)
const KernelTable* avx2_table() { return nullptr; }
#endif
#if !(defined(__aarch64__) || defined(_M_ARM64))
const KernelTable* neon_table() { return nullptr; }
#endif
}  // namespace detail

namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const KernelTable* pick_default() {
  if (const char* env = std::getenv("SIEVE_SIMD"); env != nullptr) {
    const std::string want(env);
    if (want == "scalar") return &detail::scalar_table();
    if (want == "avx2" && available(Isa::Avx2)) return detail::avx2_table();
    if (want == "neon" && available(Isa::Neon)) return detail::neon_table();
  }
  if (available(Isa::Avx2)) return detail::avx2_table();
  if (available(Isa::Neon)) return detail::neon_table();
  return &detail::scalar_table();
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "unknown";
}

bool available(Isa isa) {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2: return detail::avx2_table() != nullptr && cpu_has_avx2();
    case Isa::Neon: return detail::neon_table() != nullptr;
  }
  return false;
}

const KernelTable& table(Isa isa) {
  if (!available(isa)) {
    throw DomainError("SIMD variant not available: " + std::string(isa_name(isa)));
  }
  switch (isa) {
    case Isa::Avx2: return *detail::avx2_table();
    case Isa::Neon: return *detail::neon_table();
    case Isa::Scalar: break;
  }
  return detail::scalar_table();
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (t == nullptr) {
    const KernelTable* picked = pick_default();
    g_active.compare_exchange_strong(t, picked, std::memory_order_acq_rel);
    t = g_active.load(std::memory_order_acquire);
  }
  return *t;
}

void select(Isa isa) { g_active.store(&table(isa), std::memory_order_release); }

}  // namespace sieve::simd
