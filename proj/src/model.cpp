#include "sieve/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sieve/design.hpp"
#include "sieve/error.hpp"

namespace sieve {

void Dataset::validate() const {
  if (features.rows() != outcome.size()) {
    throw InputError("dataset: " + std::to_string(features.rows()) + " feature rows but " +
                     std::to_string(outcome.size()) + " outcomes");
  }
  if (!features.allFinite()) throw InputError("dataset: non-finite feature value");
  if (!outcome.allFinite()) throw InputError("dataset: non-finite outcome value");
}

Dataset Dataset::subset(const std::vector<Eigen::Index>& rows) const {
  Dataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.outcome.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    out.outcome(static_cast<Eigen::Index>(i)) = outcome(rows[i]);
  }
  out.feature_names = feature_names;
  return out;
}

FitConfig default_hyperparams(std::size_t n, int d, int d_prime, double c0,
                              std::size_t entry_budget) {
  if (n < 2) throw DomainError("default_hyperparams needs n >= 2");
  if (d < 1 || d_prime < 1) throw DomainError("default_hyperparams: d and D' must be >= 1");
  const double nn = static_cast<double>(n);
  const double log_factor = std::pow(std::max(1.0, std::log(nn)), d_prime - 1);
  const double raw = c0 * std::cbrt(nn) * log_factor;
  auto J = static_cast<std::size_t>(std::ceil(raw));
  J = std::max<std::size_t>(J, 1);
  J = std::min(J, 50 * n);
  J = std::min(J, entry_budget / static_cast<std::size_t>(d));

  FitConfig cfg;
  cfg.d_prime = d_prime;
  cfg.J = J;
  cfg.lambda = std::sqrt(std::log(static_cast<double>(J)) / nn);
  cfg.c0 = c0;
  cfg.entry_budget = entry_budget;
  return cfg;
}

FitConfig resolve_config(const FitConfig& cfg, std::size_t n, int d) {
  FitConfig out = cfg;
  if (out.d_prime < 1) throw DomainError("D' must be >= 1");
  out.d_prime = std::min(out.d_prime, d);
  if (out.J == 0 || (out.estimator == Estimator::Penalized && out.lambda == 0.0)) {
    const FitConfig def = default_hyperparams(n, d, out.d_prime, out.c0, out.entry_budget);
    if (out.J == 0) out.J = def.J;
    if (out.estimator == Estimator::Penalized && out.lambda == 0.0) {
      out.lambda = std::sqrt(std::log(static_cast<double>(out.J)) / static_cast<double>(n));
    }
  }
  if (out.estimator == Estimator::Ols) out.lambda = 0.0;
  if (out.lambda < 0.0 || !std::isfinite(out.lambda)) throw DomainError("lambda must be >= 0");
  if (out.cv && out.cv->folds < 2) throw DomainError("cross-validation needs at least 2 folds");
  return out;
}

Normalizer Normalizer::fit(const Eigen::MatrixXd& features, const std::vector<std::string>& names) {
  if (features.rows() < 1) throw InputError("normalizer: no samples");
  Normalizer out;
  out.ranges.reserve(static_cast<std::size_t>(features.cols()));
  for (Eigen::Index k = 0; k < features.cols(); ++k) {
    const double lo = features.col(k).minCoeff();
    const double hi = features.col(k).maxCoeff();
    if (!(hi > lo)) {
      std::string label = "feature column " + std::to_string(k + 1);
      if (static_cast<std::size_t>(k) < names.size()) label += " ('" + names[static_cast<std::size_t>(k)] + "')";
      throw InputError(label + " is constant (degenerate dimension)");
    }
    out.ranges.emplace_back(lo, hi);
  }
  return out;
}

Eigen::MatrixXd Normalizer::apply(const Eigen::MatrixXd& features) const {
  if (static_cast<std::size_t>(features.cols()) != ranges.size()) {
    throw InputError("normalizer: expected " + std::to_string(ranges.size()) + " features, got " +
                     std::to_string(features.cols()));
  }
  if (!features.allFinite()) throw InputError("non-finite feature value");
  Eigen::MatrixXd out(features.rows(), features.cols());
  for (Eigen::Index k = 0; k < features.cols(); ++k) {
    const auto [lo, hi] = ranges[static_cast<std::size_t>(k)];
    const double width = hi - lo;
    for (Eigen::Index i = 0; i < features.rows(); ++i) {
      const double v = (features(i, k) - lo) / width;
      out(i, k) = std::clamp(v, 0.0, 1.0);
    }
  }
  return out;
}

SieveModel::SieveModel(BasisKind kind, std::shared_ptr<const IndexMatrix> index,
                       Eigen::VectorXd beta, Normalizer normalizer, ModelMeta meta)
    : kind_(kind),
      index_(std::move(index)),
      beta_(std::move(beta)),
      normalizer_(std::move(normalizer)),
      meta_(meta) {
  if (!index_) throw InputError("model: missing index matrix");
  if (static_cast<std::size_t>(beta_.size()) != index_->rows()) {
    throw InputError("model: beta has " + std::to_string(beta_.size()) + " entries but index has " +
                     std::to_string(index_->rows()) + " rows");
  }
  if (normalizer_.ranges.size() != static_cast<std::size_t>(index_->d())) {
    throw InputError("model: normalizer dimension does not match index dimension");
  }
}

SieveModel fit_sieve(const Dataset& data, const FitConfig& cfg_in) {
  data.validate();
  if (data.n() < 2) throw InputError("fit needs at least 2 samples");
  if (data.d() < 1) throw InputError("fit needs at least 1 feature");
  const auto n = static_cast<std::size_t>(data.n());
  const int d = static_cast<int>(data.d());

  FitConfig cfg = resolve_config(cfg_in, n, d);
  if (cfg.cv) {
    cfg = cross_validate(data, cfg).best;
    cfg.cv.reset();
  }

  Normalizer normalizer = Normalizer::fit(data.features, data.feature_names);
  const Eigen::MatrixXd unit = normalizer.apply(data.features);
  auto index = std::make_shared<const IndexMatrix>(
      index_matrix_for_count(d, cfg.d_prime, cfg.J, cfg.entry_budget));
  const DesignMatrix design = build_design(unit, cfg.basis, index);

  SolveResult solved;
  if (cfg.estimator == Estimator::Ols) {
    solved = ols_fit(design.values(), data.outcome);
  } else {
    LassoConfig lc;
    lc.lambda = cfg.lambda;
    lc.tol = cfg.tol;
    lc.max_sweeps = cfg.max_sweeps;
    lc.penalize_intercept = cfg.penalize_intercept;
    solved = lasso_fit(design.values(), data.outcome, lc);
  }

  ModelMeta meta;
  meta.n_train = n;
  meta.lambda = cfg.lambda;
  meta.converged = solved.converged;
  return SieveModel(cfg.basis, std::move(index), std::move(solved.beta), std::move(normalizer), meta);
}

Eigen::VectorXd predict(const SieveModel& model, const Eigen::MatrixXd& features) {
  if (features.cols() != model.d()) {
    throw InputError("predict: model expects " + std::to_string(model.d()) + " features, got " +
                     std::to_string(features.cols()));
  }
  const Eigen::MatrixXd unit = model.normalizer().apply(features);
  const Eigen::Index m = unit.rows();
  Eigen::VectorXd out(m);
  // Row blocks bound the design memory; each row's sum is the same as in an
  // unblocked evaluation.
  constexpr Eigen::Index kBlock = 4096;
  for (Eigen::Index start = 0; start < m; start += kBlock) {
    const Eigen::Index len = std::min(kBlock, m - start);
    const Eigen::MatrixXd block = unit.middleRows(start, len);
    const DesignMatrix design = build_design(block, model.kind(), model.index_ptr());
    out.segment(start, len) = apply_coefficients(design.values(), model.beta());
  }
  return out;
}

}  // namespace sieve
