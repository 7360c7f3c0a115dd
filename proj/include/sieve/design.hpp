#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>

#include "sieve/basis.hpp"
#include "sieve/index.hpp"

namespace sieve {

// psi(x) = prod_k phi_{row[k]}(x[k]); entries equal to one are skipped.
double eval_product_basis(BasisKind kind, std::span<const std::uint32_t> row,
                          std::span<const double> x);

// Dense n x J matrix of product-basis evaluations, column-major so that each
// basis function's column is contiguous for the solver kernels.
class DesignMatrix {
 public:
  DesignMatrix(Eigen::MatrixXd values, BasisKind kind, std::shared_ptr<const IndexMatrix> index)
      : values_(std::move(values)), kind_(kind), index_(std::move(index)) {}

  Eigen::Index n() const { return values_.rows(); }
  Eigen::Index cols() const { return values_.cols(); }
  const Eigen::MatrixXd& values() const { return values_; }
  std::span<const double> column(Eigen::Index j) const {
    return {values_.col(j).data(), static_cast<std::size_t>(values_.rows())};
  }
  BasisKind kind() const { return kind_; }
  const IndexMatrix& index() const { return *index_; }
  const std::shared_ptr<const IndexMatrix>& index_ptr() const { return index_; }

 private:
  Eigen::MatrixXd values_;
  BasisKind kind_;
  std::shared_ptr<const IndexMatrix> index_;
};

// features: n x d with every entry in [0,1]. Each univariate value
// phi_f(x_ik) is computed once per (sample, dimension, frequency) and reused
// across all columns that need it. Column blocks are filled in parallel;
// output does not depend on the thread count.
DesignMatrix build_design(const Eigen::MatrixXd& features, BasisKind kind,
                          std::shared_ptr<const IndexMatrix> index);

// out = sum_j beta_j * design.col(j), accumulated column by column. Used for
// both in-sample fitted values and prediction so the two agree bit for bit.
Eigen::VectorXd apply_coefficients(const Eigen::Ref<const Eigen::MatrixXd>& design,
                                   const Eigen::VectorXd& beta);

}  // namespace sieve
