#include <cmath>
#include <numbers>

#include "doctest.h"
#include "sieve/basis.hpp"
#include "sieve/error.hpp"
#include "sieve/simulate.hpp"

using namespace sieve;
using doctest::Approx;

namespace {

// Composite Simpson on [0,1] with `intervals` (even) sub-intervals.
template <typename F>
double simpson(F f, int intervals) {
  const double h = 1.0 / intervals;
  double s = f(0.0) + f(1.0);
  for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_CASE("eval_basis examples") {
  CHECK(eval_basis(BasisKind::Cosine, 1, 0.37) == 1.0);
  CHECK(eval_basis(BasisKind::Cosine, 2, 0.0) == Approx(std::numbers::sqrt2).epsilon(1e-15));
  CHECK(std::abs(eval_basis(BasisKind::Cosine, 3, 0.25)) < 1e-15);
  // Orthonormal Legendre is sqrt(2j-1) times Leg(2(x-0.5), j).
  CHECK(eval_basis(BasisKind::Legendre, 2, 0.75) == Approx(std::sqrt(3.0) * legendre(2 * (0.75 - 0.5), 2)));
  CHECK(legendre(2 * (0.75 - 0.5), 2) == 0.5);
  CHECK(eval_basis(BasisKind::Legendre, 3, 0.9) == Approx(std::sqrt(5.0) * legendre(0.8, 3)));
  CHECK(eval_basis(BasisKind::Sine, 2, 0.3) == Approx(std::sin(2.5 * std::numbers::pi * 0.3)));
}

TEST_CASE("phi_1 is constant for every kind") {
  for (auto kind : {BasisKind::Cosine, BasisKind::Sine, BasisKind::Legendre}) {
    for (double x : {0.0, 0.13, 0.5, 1.0}) CHECK(eval_basis(kind, 1, x) == 1.0);
  }
}

TEST_CASE("eval_basis domain errors") {
  CHECK_THROWS_AS(eval_basis(BasisKind::Cosine, 0, 0.5), DomainError);
  CHECK_THROWS_AS(eval_basis(BasisKind::Cosine, 2, -0.01), DomainError);
  CHECK_THROWS_AS(eval_basis(BasisKind::Sine, 2, 1.5), DomainError);
  CHECK_THROWS_AS(eval_basis(BasisKind::Legendre, 2, std::nan("")), DomainError);
  CHECK_THROWS_AS(eval_basis_row(BasisKind::Cosine, 0, 0.5), DomainError);
}

TEST_CASE("eval_basis_row examples") {
  const double r2 = std::numbers::sqrt2;
  CHECK(eval_basis_row(BasisKind::Cosine, 1, 0.9) == std::vector<double>{1.0});
  auto zero = eval_basis_row(BasisKind::Cosine, 3, 0.0);
  CHECK(zero[0] == 1.0);
  CHECK(zero[1] == Approx(r2));
  CHECK(zero[2] == Approx(r2));
  auto half = eval_basis_row(BasisKind::Cosine, 4, 0.5);
  CHECK(half[0] == 1.0);
  CHECK(std::abs(half[1]) < 1e-15);
  CHECK(half[2] == Approx(-r2));
  CHECK(std::abs(half[3]) < 1e-15);
  for (auto kind : {BasisKind::Cosine, BasisKind::Sine, BasisKind::Legendre}) {
    auto row = eval_basis_row(kind, 12, 0.417);
    for (int j = 1; j <= 12; ++j) CHECK(row[static_cast<std::size_t>(j - 1)] == eval_basis(kind, j, 0.417));
  }
}

TEST_CASE("cosine system is orthonormal (Simpson, 2e4 intervals)") {
  double worst = 0.0;
  for (int i = 1; i <= 20; ++i) {
    for (int j = i; j <= 20; ++j) {
      const double ip = simpson([&](double x) { return eval_basis(BasisKind::Cosine, i, x) * eval_basis(BasisKind::Cosine, j, x); }, 20000);
      worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("Legendre system is orthonormal") {
  double worst = 0.0;
  for (int i = 1; i <= 10; ++i) {
    for (int j = i; j <= 10; ++j) {
      const double ip = simpson([&](double x) { return eval_basis(BasisKind::Legendre, i, x) * eval_basis(BasisKind::Legendre, j, x); }, 20000);
      worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  }
  CHECK(worst <= 1e-8);
}

TEST_CASE("cosine sup-norm bound") {
  double worst = 0.0;
  for (int j = 1; j <= 1000; j += 7) {
    for (int g = 0; g <= 10000; ++g) worst = std::max(worst, std::abs(eval_basis(BasisKind::Cosine, j, g / 10000.0)));
  }
  CHECK(worst <= std::numbers::sqrt2 * (1 + 1e-15));
  CHECK(basis_sup_bound(BasisKind::Cosine, 50) == std::numbers::sqrt2);
  CHECK(basis_sup_bound(BasisKind::Legendre, 4) == Approx(std::sqrt(7.0)));
  CHECK(std::abs(eval_basis(BasisKind::Legendre, 4, 1.0)) == Approx(std::sqrt(7.0)));
}

TEST_CASE("basis kind names") {
  for (auto kind : {BasisKind::Cosine, BasisKind::Sine, BasisKind::Legendre}) {
    CHECK(basis_kind_from_string(to_string(kind)) == kind);
  }
  CHECK(to_string(BasisKind::Legendre) == "legendre");
  CHECK_THROWS_AS(basis_kind_from_string("Cosine"), DomainError);
}
