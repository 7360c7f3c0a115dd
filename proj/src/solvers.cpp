#include "sieve/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <string>

#include "sieve/error.hpp"
#include "sieve/simd.hpp"

namespace sieve {

namespace {

void check_problem(const DesignRef& design, const Eigen::VectorXd& y) {
  if (design.rows() < 1 || design.cols() < 1) throw InputError("empty design matrix");
  if (design.rows() != y.size()) {
    throw InputError("design has " + std::to_string(design.rows()) + " rows but outcome has " +
                     std::to_string(y.size()) + " entries");
  }
  if (!y.allFinite()) throw InputError("outcome vector contains non-finite values");
}

std::span<const double> col_span(const DesignRef& design, Eigen::Index j) {
  return {design.col(j).data(), static_cast<std::size_t>(design.rows())};
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

Eigen::VectorXd residual(const DesignRef& design, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& beta) {
  return y - apply_coefficients(design, beta);
}

double kkt_from_residual(const DesignRef& design, const Eigen::VectorXd& r,
                         const Eigen::VectorXd& beta, double lambda, bool penalize_intercept) {
  const double scale = 2.0 / static_cast<double>(design.rows());
  std::span<const double> rs(r.data(), static_cast<std::size_t>(r.size()));
  double worst = 0.0;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    const double g = scale * simd::dot(col_span(design, j), rs);
    double v = 0.0;
    if (j == 0 && !penalize_intercept) {
      v = std::abs(g);
    } else if (beta(j) != 0.0) {
      v = std::abs(g - lambda * (beta(j) > 0.0 ? 1.0 : -1.0));
    } else {
      v = std::max(0.0, std::abs(g) - lambda);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

double objective_from_residual(const Eigen::VectorXd& r, const Eigen::VectorXd& beta,
                               double lambda, bool penalize_intercept) {
  double pen = 0.0;
  for (Eigen::Index j = (penalize_intercept ? 0 : 1); j < beta.size(); ++j) pen += std::abs(beta(j));
  const double rss = simd::sum_sq(std::span<const double>(r.data(), static_cast<std::size_t>(r.size())));
  return rss / static_cast<double>(r.size()) + lambda * pen;
}

}  // namespace

SolveResult ols_fit(const DesignRef& design, const Eigen::VectorXd& y) {
  check_problem(design, y);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  SolveResult out;
  out.beta = cod.solve(y);
  out.min_norm = cod.rank() < design.cols();
  out.converged = true;
  out.kkt_residual = kkt_residual(design, y, out.beta, 0.0);
  return out;
}

double lambda_max(const DesignRef& design, const Eigen::VectorXd& y) {
  check_problem(design, y);
  std::span<const double> ys(y.data(), static_cast<std::size_t>(y.size()));
  double m = 0.0;
  for (Eigen::Index j = 0; j < design.cols(); ++j) {
    m = std::max(m, std::abs(simd::dot(col_span(design, j), ys)));
  }
  return 2.0 / static_cast<double>(design.rows()) * m;
}

double kkt_residual(const DesignRef& design, const Eigen::VectorXd& y, const Eigen::VectorXd& beta,
                    double lambda, bool penalize_intercept) {
  check_problem(design, y);
  return kkt_from_residual(design, residual(design, y, beta), beta, lambda, penalize_intercept);
}

double lasso_objective(const DesignRef& design, const Eigen::VectorXd& y,
                       const Eigen::VectorXd& beta, double lambda, bool penalize_intercept) {
  check_problem(design, y);
  return objective_from_residual(residual(design, y, beta), beta, lambda, penalize_intercept);
}

SolveResult lasso_fit(const DesignRef& design, const Eigen::VectorXd& y, const LassoConfig& cfg,
                      const Eigen::VectorXd* warm_start) {
  check_problem(design, y);
  if (!(cfg.lambda >= 0.0) || !std::isfinite(cfg.lambda)) {
    throw DomainError("lasso penalty must be a finite non-negative number");
  }
  if (!(cfg.tol > 0.0)) throw DomainError("lasso tolerance must be positive");
  if (cfg.max_sweeps < 1) throw DomainError("lasso max_sweeps must be >= 1");

  const Eigen::Index n = design.rows();
  const Eigen::Index J = design.cols();
  const double scale = 2.0 / static_cast<double>(n);
  const double lambda = cfg.lambda;
  const double kkt_target = 10.0 * cfg.tol * std::max(1.0, lambda);

  Eigen::VectorXd curvature(J);
  for (Eigen::Index j = 0; j < J; ++j) curvature(j) = scale * simd::sum_sq(col_span(design, j));

  SolveResult out;
  if (warm_start != nullptr) {
    if (warm_start->size() != J) throw InputError("warm start length does not match design");
    out.beta = *warm_start;
  } else {
    out.beta = Eigen::VectorXd::Zero(J);
  }
  Eigen::VectorXd r = residual(design, y, out.beta);
  std::span<double> rs(r.data(), static_cast<std::size_t>(n));

  auto update = [&](Eigen::Index j) -> double {
    const double a = curvature(j);
    const double old = out.beta(j);
    if (a <= 0.0) {
      out.beta(j) = 0.0;
      return std::abs(old);
    }
    const double z = scale * simd::dot(col_span(design, j), rs) + a * old;
    const bool penalized = cfg.penalize_intercept || j != 0;
    const double next = penalized ? soft_threshold(z, lambda) / a : z / a;
    if (next != old) {
      simd::axpy(old - next, col_span(design, j), rs);
      out.beta(j) = next;
    }
    return std::abs(next - old);
  };

  auto record = [&] {
    if (cfg.track_objective) {
      out.objective_trace.push_back(
          objective_from_residual(r, out.beta, lambda, cfg.penalize_intercept));
    }
  };

  if (cfg.track_objective) {
    out.objective_trace.push_back(
        objective_from_residual(r, out.beta, lambda, cfg.penalize_intercept));
  }

  std::vector<Eigen::Index> active;
  while (out.sweeps_used < cfg.max_sweeps) {
    double max_change = 0.0;
    for (Eigen::Index j = 0; j < J; ++j) max_change = std::max(max_change, update(j));
    ++out.sweeps_used;
    // Refresh the residual once per full sweep so rounding does not drift.
    r = residual(design, y, out.beta);
    rs = std::span<double>(r.data(), static_cast<std::size_t>(n));
    record();

    if (max_change < cfg.tol) {
      out.kkt_residual = kkt_from_residual(design, r, out.beta, lambda, cfg.penalize_intercept);
      if (out.kkt_residual <= kkt_target) {
        out.converged = true;
        break;
      }
      continue;
    }

    active.clear();
    for (Eigen::Index j = 0; j < J; ++j) {
      if (out.beta(j) != 0.0 || (j == 0 && !cfg.penalize_intercept)) active.push_back(j);
    }
    while (out.sweeps_used < cfg.max_sweeps) {
      double change = 0.0;
      for (Eigen::Index j : active) change = std::max(change, update(j));
      ++out.sweeps_used;
      record();
      if (change < cfg.tol) break;
    }
  }

  if (!out.converged) {
    r = residual(design, y, out.beta);
    out.kkt_residual = kkt_from_residual(design, r, out.beta, lambda, cfg.penalize_intercept);
  }
  return out;
}

std::vector<SolveResult> lasso_path(const DesignRef& design, const Eigen::VectorXd& y,
                                    const std::vector<double>& lambdas, const LassoConfig& cfg) {
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    if (!(lambdas[k] >= 0.0)) throw DomainError("lasso path: lambdas must be non-negative");
    if (k > 0 && !(lambdas[k] < lambdas[k - 1])) {
      throw DomainError("lasso path: lambdas must be strictly descending");
    }
  }
  std::vector<SolveResult> out;
  out.reserve(lambdas.size());
  LassoConfig step = cfg;
  for (std::size_t k = 0; k < lambdas.size(); ++k) {
    step.lambda = lambdas[k];
    out.push_back(lasso_fit(design, y, step, k == 0 ? nullptr : &out.back().beta));
  }
  return out;
}

std::vector<double> geometric_grid(double hi, double decades, int count) {
  if (count < 1) throw DomainError("grid size must be >= 1");
  std::vector<double> grid(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const double frac = count == 1 ? 0.0 : static_cast<double>(k) / (count - 1);
    grid[static_cast<std::size_t>(k)] = hi * std::pow(10.0, -decades * frac);
  }
  return grid;
}

}  // namespace sieve
