#include "sieve/design.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "sieve/error.hpp"
#include "sieve/parallel.hpp"
#include "sieve/simd.hpp"

namespace sieve {

double eval_product_basis(BasisKind kind, std::span<const std::uint32_t> row,
                          std::span<const double> x) {
  if (row.size() != x.size()) {
    throw DomainError("product basis: row length " + std::to_string(row.size()) +
                      " does not match point dimension " + std::to_string(x.size()));
  }
  double p = 1.0;
  for (std::size_t k = 0; k < row.size(); ++k) {
    if (row[k] > 1) p *= eval_basis(kind, static_cast<int>(row[k]), x[k]);
  }
  return p;
}

DesignMatrix build_design(const Eigen::MatrixXd& features, BasisKind kind,
                          std::shared_ptr<const IndexMatrix> index) {
  if (!index) throw InputError("build_design: missing index matrix");
  const Eigen::Index n = features.rows();
  const int d = index->d();
  if (features.cols() != d) {
    throw InputError("build_design: feature dimension " + std::to_string(features.cols()) +
                     " does not match index dimension " + std::to_string(d));
  }
  for (Eigen::Index k = 0; k < features.cols(); ++k) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = features(i, k);
      if (!std::isfinite(v)) {
        throw InputError("build_design: non-finite feature at row " + std::to_string(i + 1));
      }
      if (v < 0.0 || v > 1.0) {
        throw InputError("build_design: feature outside [0,1] at row " + std::to_string(i + 1) +
                         ", column " + std::to_string(k + 1));
      }
    }
  }

  // Univariate cache: cache[k][f] holds phi_f(X[:,k]) for every frequency f
  // that appears in column k of the index (f >= 2).
  std::vector<std::vector<Eigen::VectorXd>> cache(static_cast<std::size_t>(d));
  std::vector<std::pair<int, std::uint32_t>> needed;
  for (int k = 0; k < d; ++k) {
    cache[static_cast<std::size_t>(k)].resize(index->max_entry(k) + 1);
  }
  {
    std::vector<std::vector<char>> used(static_cast<std::size_t>(d));
    for (int k = 0; k < d; ++k) used[static_cast<std::size_t>(k)].assign(index->max_entry(k) + 1, 0);
    for (std::size_t j = 0; j < index->rows(); ++j) {
      auto r = index->row(j);
      for (int k = 0; k < d; ++k) {
        const std::uint32_t f = r[static_cast<std::size_t>(k)];
        if (f > 1 && !used[static_cast<std::size_t>(k)][f]) {
          used[static_cast<std::size_t>(k)][f] = 1;
          needed.emplace_back(k, f);
        }
      }
    }
  }
  parallel_for(needed.size(), [&](std::size_t t) {
    const auto [k, f] = needed[t];
    Eigen::VectorXd col(n);
    for (Eigen::Index i = 0; i < n; ++i) col(i) = eval_basis(kind, static_cast<int>(f), features(i, k));
    cache[static_cast<std::size_t>(k)][f] = std::move(col);
  });

  const auto J = static_cast<Eigen::Index>(index->rows());
  Eigen::MatrixXd values(n, J);
  constexpr std::size_t kBlock = 64;
  const std::size_t blocks = (static_cast<std::size_t>(J) + kBlock - 1) / kBlock;
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t begin = b * kBlock;
    const std::size_t end = std::min(begin + kBlock, static_cast<std::size_t>(J));
    for (std::size_t j = begin; j < end; ++j) {
      auto col = values.col(static_cast<Eigen::Index>(j));
      col.setOnes();
      std::span<double> out(col.data(), static_cast<std::size_t>(n));
      auto r = index->row(j);
      for (int k = 0; k < d; ++k) {
        const std::uint32_t f = r[static_cast<std::size_t>(k)];
        if (f <= 1) continue;
        const Eigen::VectorXd& phi = cache[static_cast<std::size_t>(k)][f];
        simd::mul(std::span<const double>(phi.data(), static_cast<std::size_t>(n)), out);
      }
    }
  });

  return DesignMatrix(std::move(values), kind, std::move(index));
}

Eigen::VectorXd apply_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& design,
                                   const Eigen::VectorXd& beta) {
  if (design.cols() != beta.size()) {
    throw InputError("coefficient length " + std::to_string(beta.size()) +
                     " does not match design columns " + std::to_string(design.cols()));
  }
  const Eigen::Index n = design.rows();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  std::span<double> acc(out.data(), static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    if (beta(j) == 0.0) continue;
    simd::axpy(beta(j), std::span<const double>(design.col(j).data(), static_cast<std::size_t>(n)),
               acc);
  }
  return out;
}

}  // namespace sieve
