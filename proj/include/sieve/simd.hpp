#pragma once

// Data-parallel inner loops shared by the design-matrix builder, the
// coordinate-descent solver and prediction. Each kernel has a scalar
// reference implementation and optional vector variants; the variant is
// picked once at startup from the CPU's feature flags.
//
// Elementwise kernels (axpy, mul) give bit-identical results in every
// variant. Reductions (dot, sum_sq) reassociate and agree with the scalar
// reference only to rounding.

#include <cstddef>
#include <span>
#include <string_view>

namespace sieve::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
  Isa isa;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_sq)(const double* x, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y *= x
  void (*mul)(const double* x, double* y, std::size_t n);
};

std::string_view isa_name(Isa isa);

bool available(Isa isa);

// Throws DomainError if the variant was not compiled in or the CPU lacks it.
const KernelTable& table(Isa isa);

// The table in use. Defaults to the widest supported variant; the
// SIEVE_SIMD environment variable ("scalar", "avx2", "neon") overrides.
const KernelTable& active();

// Test hook: force a variant for the rest of the process.
void select(Isa isa);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline double sum_sq(std::span<const double> x) { return active().sum_sq(x.data(), x.size()); }

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), y.size());
}

inline void mul(std::span<const double> x, std::span<double> y) {
  active().mul(x.data(), y.data(), y.size());
}

namespace detail {
const KernelTable& scalar_table();
const KernelTable* avx2_table();  // nullptr when not compiled in
const KernelTable* neon_table();
}  // namespace detail

}  // namespace sieve::simd
