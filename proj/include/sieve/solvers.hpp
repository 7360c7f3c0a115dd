#pragma once

#include <Eigen/Dense>
#include <vector>

#include "sieve/design.hpp"

namespace sieve {

using DesignRef = Eigen::Ref<const Eigen::MatrixXd>;

// Settings for  min_beta (1/n)||y - Psi beta||^2 + lambda ||beta||_1.
struct LassoConfig {
  double lambda = 0.0;
  // Convergence: largest absolute coefficient change in a full sweep below
  // tol, and kkt_residual <= 10 * tol * max(1, lambda).
  double tol = 1e-7;
  int max_sweeps = 10'000;
  // Column 0 is the constant basis function; when false it is left unpenalized.
  bool penalize_intercept = true;
  // Record the objective after every sweep in SolveResult::objective_trace.
  bool track_objective = false;
};

struct SolveResult {
  Eigen::VectorXd beta;
  int sweeps_used = 0;
  bool converged = false;
  double kkt_residual = 0.0;
  // OLS only: the normal equations were rank deficient (or J > n) and beta
  // is the minimum-norm least-squares solution.
  bool min_norm = false;
  std::vector<double> objective_trace;
};

// Least squares through a complete orthogonal decomposition, which yields
// the minimum-norm minimizer when the design is rank deficient.
SolveResult ols_fit(const DesignRef& design, const Eigen::VectorXd& y);

// (2/n) max_j |Psi_j^T y|: the smallest lambda at which beta = 0 is optimal.
double lambda_max(const DesignRef& design, const Eigen::VectorXd& y);

// Cyclic coordinate descent with exact soft-threshold updates. Full sweeps
// until the first convergence, then sweeps over the nonzero set, verified by
// a full sweep. Non-convergence is reported through `converged`.
SolveResult lasso_fit(const DesignRef& design, const Eigen::VectorXd& y, const LassoConfig& cfg,
                      const Eigen::VectorXd* warm_start = nullptr);

// Warm-started solutions along a strictly descending lambda sequence.
std::vector<SolveResult> lasso_path(const DesignRef& design, const Eigen::VectorXd& y,
                                    const std::vector<double>& lambdas, const LassoConfig& cfg);

// Largest violation of the stationarity conditions at beta, with
// g_j = (2/n) Psi_j^T (y - Psi beta):
//   beta_j != 0: |g_j - lambda sign(beta_j)|
//   beta_j == 0: max(0, |g_j| - lambda)
//   unpenalized: |g_j|
double kkt_residual(const DesignRef& design, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                    double lambda, bool penalize_intercept = true);

// (1/n)||y - Psi beta||^2 + lambda * sum of |beta_j| over penalized j.
double lasso_objective(const DesignRef& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda,
                       bool penalize_intercept = true);

// Geometric grid of `count` values from hi down to hi * 10^-decades.
std::vector<double> geometric_grid(double hi, double decades, int count);

}  // namespace sieve
