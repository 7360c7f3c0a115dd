#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "sieve/design.hpp"
#include "sieve/error.hpp"
#include "sieve/model.hpp"
#include "sieve/parallel.hpp"

namespace sieve {

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<Eigen::Index>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i), j) = m(rows[i], j);
  }
  return out;
}

Eigen::VectorXd take_rows(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
  return out;
}

double mse(const Eigen::VectorXd& pred, const Eigen::VectorXd& y) {
  return (pred - y).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace

std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed) {
  if (folds < 2) throw DomainError("cross-validation needs at least 2 folds");
  if (static_cast<std::size_t>(folds) > n) {
    throw InputError("cross-validation: " + std::to_string(folds) + " folds but only " +
                     std::to_string(n) + " samples (a fold would be empty)");
  }
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t k = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[k]);
  }
  std::vector<int> label(n);
  for (std::size_t pos = 0; pos < n; ++pos) label[perm[pos]] = static_cast<int>(pos % static_cast<std::size_t>(folds));
  return label;
}

CvResult cross_validate(const Dataset& data, const FitConfig& cfg_in) {
  data.validate();
  if (!cfg_in.cv) throw DomainError("cross_validate: no CV settings in config");
  const auto n = static_cast<std::size_t>(data.n());
  const int d = static_cast<int>(data.d());
  const FitConfig cfg = resolve_config(cfg_in, n, d);
  const CvConfig& cv = *cfg.cv;
  if (cv.n_lambda < 1) throw DomainError("cross-validation needs at least one lambda");

  std::vector<std::size_t> j_grid = cv.j_grid.empty() ? std::vector<std::size_t>{cfg.J} : cv.j_grid;
  std::sort(j_grid.begin(), j_grid.end());
  j_grid.erase(std::unique(j_grid.begin(), j_grid.end()), j_grid.end());
  if (j_grid.front() < 1) throw DomainError("cross-validation: J grid entries must be >= 1");
  const std::size_t j_max = j_grid.back();

  const std::vector<int> label = assign_folds(n, cv.folds, cv.seed);

  const Normalizer normalizer = Normalizer::fit(data.features, data.feature_names);
  auto index = std::make_shared<const IndexMatrix>(
      index_matrix_for_count(d, cfg.d_prime, j_max, cfg.entry_budget));
  const DesignMatrix design = build_design(normalizer.apply(data.features), cfg.basis, index);

  // Lambda paths per J, fixed from the full data so every fold sees the same grid.
  std::vector<std::vector<double>> lambdas(j_grid.size());
  for (std::size_t g = 0; g < j_grid.size(); ++g) {
    if (cfg.estimator == Estimator::Ols) {
      lambdas[g] = {0.0};
      continue;
    }
    const auto J = static_cast<Eigen::Index>(j_grid[g]);
    const double top = lambda_max(design.values().leftCols(J), data.outcome);
    lambdas[g] = top > 0.0 ? geometric_grid(top, cv.decades, cv.n_lambda) : std::vector<double>{0.0};
  }

  std::vector<CvRow> table;
  std::vector<std::size_t> row_start(j_grid.size());
  for (std::size_t g = 0; g < j_grid.size(); ++g) {
    row_start[g] = table.size();
    for (double lam : lambdas[g]) {
      CvRow row;
      row.J = j_grid[g];
      row.lambda = lam;
      row.fold_mse.assign(static_cast<std::size_t>(cv.folds), 0.0);
      table.push_back(std::move(row));
    }
  }

  parallel_for(static_cast<std::size_t>(cv.folds), [&](std::size_t fold) {
    std::vector<Eigen::Index> train, valid;
    for (std::size_t i = 0; i < n; ++i) {
      (static_cast<std::size_t>(label[i]) == fold ? valid : train).push_back(static_cast<Eigen::Index>(i));
    }
    const Eigen::MatrixXd x_train = take_rows(design.values(), train);
    const Eigen::MatrixXd x_valid = take_rows(design.values(), valid);
    const Eigen::VectorXd y_train = take_rows(data.outcome, train);
    const Eigen::VectorXd y_valid = take_rows(data.outcome, valid);

    for (std::size_t g = 0; g < j_grid.size(); ++g) {
      const auto J = static_cast<Eigen::Index>(j_grid[g]);
      if (cfg.estimator == Estimator::Ols) {
        const SolveResult s = ols_fit(x_train.leftCols(J), y_train);
        table[row_start[g]].fold_mse[fold] = mse(apply_coefficients(x_valid.leftCols(J), s.beta), y_valid);
        continue;
      }
      LassoConfig lc;
      lc.tol = cfg.tol;
      lc.max_sweeps = cfg.max_sweeps;
      lc.penalize_intercept = cfg.penalize_intercept;
      const auto path = lasso_path(x_train.leftCols(J), y_train, lambdas[g], lc);
      for (std::size_t k = 0; k < path.size(); ++k) {
        table[row_start[g] + k].fold_mse[fold] =
            mse(apply_coefficients(x_valid.leftCols(J), path[k].beta), y_valid);
      }
    }
  });

  CvResult out;
  for (auto& row : table) {
    row.mean_mse = std::accumulate(row.fold_mse.begin(), row.fold_mse.end(), 0.0) /
                   static_cast<double>(row.fold_mse.size());
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < table.size(); ++r) {
    const CvRow& a = table[r];
    const CvRow& b = table[best];
    if (a.mean_mse < b.mean_mse ||
        (a.mean_mse == b.mean_mse && (a.lambda > b.lambda || (a.lambda == b.lambda && a.J < b.J)))) {
      best = r;
    }
  }
  out.best = cfg;
  out.best.J = table[best].J;
  out.best.lambda = table[best].lambda;
  out.best_row = best;
  out.table = std::move(table);
  return out;
}

}  // namespace sieve
