#include "sieve/basis.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sieve/error.hpp"

namespace sieve {

namespace {

void check_x(double x) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw DomainError("basis argument outside [0,1]: " + std::to_string(x));
  }
}

// Orthonormal shifted Legendre value via the three-term recurrence on [-1,1].
double legendre_orthonormal(int j, double x) {
  const double t = 2.0 * x - 1.0;
  const int degree = j - 1;
  double p_prev = 1.0;
  double p = t;
  if (degree == 0) {
    p = 1.0;
  } else {
    for (int k = 1; k < degree; ++k) {
      const double next = ((2.0 * k + 1.0) * t * p - k * p_prev) / (k + 1.0);
      p_prev = p;
      p = next;
    }
  }
  return std::sqrt(2.0 * j - 1.0) * p;
}

}  // namespace

std::string_view to_string(BasisKind kind) {
  switch (kind) {
    case BasisKind::Cosine: return "cosine";
    case BasisKind::Sine: return "sine";
    case BasisKind::Legendre: return "legendre";
  }
  return "cosine";
}

BasisKind basis_kind_from_string(std::string_view name) {
  if (name == "cosine") return BasisKind::Cosine;
  if (name == "sine") return BasisKind::Sine;
  if (name == "legendre") return BasisKind::Legendre;
  throw DomainError("unknown basis kind: " + std::string(name));
}

double eval_basis(BasisKind kind, int j, double x) {
  if (j < 1) throw DomainError("basis index must be >= 1, got " + std::to_string(j));
  check_x(x);
  if (j == 1) return 1.0;
  switch (kind) {
    case BasisKind::Cosine:
      return std::numbers::sqrt2 * std::cos((j - 1) * std::numbers::pi * x);
    case BasisKind::Sine:
      return std::sin((j + 0.5) * std::numbers::pi * x);
    case BasisKind::Legendre:
      return legendre_orthonormal(j, x);
  }
  return 0.0;
}

void eval_basis_row(BasisKind kind, double x, std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = eval_basis(kind, static_cast<int>(j + 1), x);
  }
}

std::vector<double> eval_basis_row(BasisKind kind, int count, double x) {
  if (count < 1) throw DomainError("basis row length must be >= 1");
  std::vector<double> out(static_cast<std::size_t>(count));
  eval_basis_row(kind, x, out);
  return out;
}

double basis_sup_bound(BasisKind kind, int max_index) {
  if (max_index <= 1) return 1.0;
  switch (kind) {
    case BasisKind::Cosine: return std::numbers::sqrt2;
    case BasisKind::Sine: return 1.0;
    // |P_k| <= 1 on [-1,1], attained at the endpoints.
    case BasisKind::Legendre: return std::sqrt(2.0 * max_index - 1.0);
  }
  return 1.0;
}

}  // namespace sieve
