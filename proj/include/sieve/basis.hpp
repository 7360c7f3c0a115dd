#pragma once

#include <span>
#include <string_view>
#include <vector>

namespace sieve {

// Univariate function systems on [0,1]. Every kind has phi_1 == 1.
//   Cosine:   phi_j(x) = sqrt(2) cos((j-1) pi x),  j >= 2
//   Sine:     phi_j(x) = sin((j+1/2) pi x),        j >= 2
//   Legendre: phi_j(x) = sqrt(2j-1) P_{j-1}(2x-1), orthonormal in L2[0,1]
enum class BasisKind { Cosine, Sine, Legendre };

// "cosine" | "sine" | "legendre"
std::string_view to_string(BasisKind kind);
BasisKind basis_kind_from_string(std::string_view name);

// Throws DomainError when j < 1 or x is outside [0,1].
double eval_basis(BasisKind kind, int j, double x);

// out[j-1] = eval_basis(kind, j, x) for j = 1..out.size(), bit-identical to
// calling eval_basis one index at a time.
void eval_basis_row(BasisKind kind, double x, std::span<double> out);
std::vector<double> eval_basis_row(BasisKind kind, int count, double x);

// sup_{x in [0,1]} max_{j <= max_index} |phi_j(x)|.
double basis_sup_bound(BasisKind kind, int max_index);

}  // namespace sieve
