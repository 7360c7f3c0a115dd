#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace sieve {

// Reproducing kernel of W_1([0,1]) (inner product <f,g> + <f',g'>):
//   k(s,t) = cosh(min(s,t)) cosh(1 - max(s,t)) / sinh(1).
double w1_kernel(double s, double t);

// Mercer eigenvalue paired with the cosine basis function phi_j:
//   lambda_1 = 1,  lambda_j = 1 / (1 + ((j-1) pi)^2).
double w1_mercer_eigenvalue(int j);

// sum_{j <= terms} lambda_j phi_j(s) phi_j(t) with the cosine basis.
double w1_kernel_mercer(double s, double t, int terms);

// Product of w1_kernel over `active_dims` (0-based); all dimensions when
// active_dims is empty.
double product_kernel(std::span<const double> x, std::span<const double> z,
                      std::span<const int> active_dims = {});

// K(i,j) = product_kernel(a_i, b_j). Rows are filled in parallel.
Eigen::MatrixXd cross_gram(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b,
                           std::span<const int> active_dims = {});
Eigen::MatrixXd gram_matrix(const Eigen::MatrixXd& x, std::span<const int> active_dims = {});

// Kernel ridge regression: alpha solves (K + n ridge I) alpha = y.
class KrrModel {
 public:
  KrrModel(Eigen::MatrixXd features, Eigen::VectorXd alpha, double ridge, std::vector<int> active_dims);

  const Eigen::MatrixXd& features() const { return features_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  double ridge() const { return ridge_; }
  const std::vector<int>& active_dims() const { return active_dims_; }

  Eigen::VectorXd predict(const Eigen::MatrixXd& x) const;

 private:
  Eigen::MatrixXd features_;
  Eigen::VectorXd alpha_;
  double ridge_;
  std::vector<int> active_dims_;
};

// Features must lie in [0,1]. Dense Cholesky; one retry with 1e-10 added to
// the diagonal, then NumericalError.
KrrModel krr_fit(const Eigen::MatrixXd& features, const Eigen::VectorXd& y, double ridge,
                 std::vector<int> active_dims = {});

}  // namespace sieve
