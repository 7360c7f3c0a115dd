#include <cmath>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "sieve/simd.hpp"
#include "test_util.hpp"

using namespace sieve;

namespace {

std::vector<const simd::KernelTable*> variants() {
  std::vector<const simd::KernelTable*> out;
  for (auto isa : {simd::Isa::Scalar, simd::Isa::Avx2, simd::Isa::Neon}) {
    if (simd::available(isa)) out.push_back(&simd::table(isa));
  }
  return out;
}

std::vector<double> vec(std::size_t n, std::uint64_t seed) {
  auto v = test::random_vector(static_cast<Eigen::Index>(n), seed, -3.0, 3.0);
  return {v.data(), v.data() + v.size()};
}

}  // namespace

TEST_CASE("scalar kernels are always available and active table is one of the variants") {
  CHECK(simd::available(simd::Isa::Scalar));
  const auto& active = simd::active();
  CHECK(simd::available(active.isa));
  CHECK_THROWS_AS((void)simd::table(static_cast<simd::Isa>(99)), std::exception);
}

TEST_CASE("vector variants agree with the scalar reference") {
  const auto& ref = simd::table(simd::Isa::Scalar);
  for (const auto* t : variants()) {
    CAPTURE(simd::isa_name(t->isa));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 63u, 64u, 65u, 1000u, 1003u}) {
      CAPTURE(n);
      auto a = vec(n, 11 + n);
      auto b = vec(n, 97 + n);

      // Reductions: same value up to reassociation.
      double scale = 0.0;
      for (std::size_t i = 0; i < n; ++i) scale += std::abs(a[i] * b[i]);
      CHECK(std::abs(t->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <= 1e-14 * (scale + 1.0));
      double sq = 0.0;
      for (double v : a) sq += v * v;
      CHECK(std::abs(t->sum_sq(a.data(), n) - ref.sum_sq(a.data(), n)) <= 1e-14 * (sq + 1.0));

      // Elementwise kernels: bit-identical.
      auto y1 = b, y2 = b;
      t->axpy(-0.37, a.data(), y1.data(), n);
      ref.axpy(-0.37, a.data(), y2.data(), n);
      CHECK(std::memcmp(y1.data(), y2.data(), n * sizeof(double)) == 0);
      auto m1 = b, m2 = b;
      t->mul(a.data(), m1.data(), n);
      ref.mul(a.data(), m2.data(), n);
      CHECK(std::memcmp(m1.data(), m2.data(), n * sizeof(double)) == 0);
    }
  }
}

TEST_CASE("span wrappers route through the active table") {
  std::vector<double> a{1, 2, 3, 4, 5}, b{5, 4, 3, 2, 1};
  CHECK(simd::dot(a, b) == doctest::Approx(35.0));
  CHECK(simd::sum_sq(a) == doctest::Approx(55.0));
  simd::axpy(2.0, a, b);
  CHECK(b == std::vector<double>{7, 8, 9, 10, 11});
  simd::mul(a, b);
  CHECK(b == std::vector<double>{7, 16, 27, 40, 55});
}
