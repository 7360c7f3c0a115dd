#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sieve/basis.hpp"
#include "sieve/index.hpp"
#include "sieve/solvers.hpp"

namespace sieve {

// Features (n x d) and outcome (n). Feature names are optional and only
// used in messages and CSV round trips.
struct Dataset {
  Eigen::MatrixXd features;
  Eigen::VectorXd outcome;
  std::vector<std::string> feature_names;

  Eigen::Index n() const { return features.rows(); }
  Eigen::Index d() const { return features.cols(); }

  // Throws InputError on row-count mismatch or non-finite values.
  void validate() const;
  Dataset subset(const std::vector<Eigen::Index>& rows) const;
};

enum class Estimator { Ols, Penalized };

struct CvConfig {
  int folds = 5;
  // Lambda path per J: geometric from lambda_max down `decades` decades.
  int n_lambda = 20;
  double decades = 3.0;
  // Basis counts to try; empty means the single resolved J.
  std::vector<std::size_t> j_grid;
  std::uint64_t seed = 20240611;
};

struct FitConfig {
  Estimator estimator = Estimator::Penalized;
  BasisKind basis = BasisKind::Cosine;
  int d_prime = 1;
  // 0 selects the default rule in default_hyperparams.
  std::size_t J = 0;
  // Penalized only; 0 selects sqrt(ln J / n).
  double lambda = 0.0;
  std::optional<CvConfig> cv;
  bool penalize_intercept = true;
  double tol = 1e-7;
  int max_sweeps = 10'000;
  // Constant in the default basis-count rule.
  double c0 = 5.0;
  std::size_t entry_budget = kDefaultEntryBudget;
};

// Default basis count and penalty for n samples:
//   J = ceil(c0 * n^(1/3) * max(1, ln n)^(D'-1)), capped at 50 n and by the
//   entry budget;  lambda = sqrt(ln J / n).
FitConfig default_hyperparams(std::size_t n, int d, int d_prime, double c0 = 5.0,
                              std::size_t entry_budget = kDefaultEntryBudget);

// Fills J and lambda left at 0 from default_hyperparams. d_prime is clamped
// to d.
FitConfig resolve_config(const FitConfig& cfg, std::size_t n, int d);

// Per-dimension min-max map onto [0,1]; values outside the training range
// are clamped to the boundary.
struct Normalizer {
  std::vector<std::pair<double, double>> ranges;

  // Throws InputError naming the first constant column.
  static Normalizer fit(const Eigen::MatrixXd& features,
                        const std::vector<std::string>& names = {});
  Eigen::MatrixXd apply(const Eigen::MatrixXd& features) const;
};

struct ModelMeta {
  std::size_t n_train = 0;
  double lambda = 0.0;
  bool converged = true;
};

// beta has one entry per index row; prediction is
//   f(x) = sum_j beta_j psi_j(normalize(x)).
// Immutable after construction; predict is safe to call concurrently.
class SieveModel {
 public:
  SieveModel(BasisKind kind, std::shared_ptr<const IndexMatrix> index, Eigen::VectorXd beta,
             Normalizer normalizer, ModelMeta meta);

  BasisKind kind() const { return kind_; }
  const IndexMatrix& index() const { return *index_; }
  const std::shared_ptr<const IndexMatrix>& index_ptr() const { return index_; }
  const Eigen::VectorXd& beta() const { return beta_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const ModelMeta& meta() const { return meta_; }
  int d() const { return index_->d(); }

 private:
  BasisKind kind_;
  std::shared_ptr<const IndexMatrix> index_;
  Eigen::VectorXd beta_;
  Normalizer normalizer_;
  ModelMeta meta_;
};

struct CvRow {
  std::size_t J = 0;
  double lambda = 0.0;
  std::vector<double> fold_mse;
  double mean_mse = 0.0;
};

struct CvResult {
  FitConfig best;
  std::vector<CvRow> table;
  std::size_t best_row = 0;
};

// Deterministic fold labels in [0, folds) for n samples.
std::vector<int> assign_folds(std::size_t n, int folds, std::uint64_t seed);

// k-fold CV over (J grid) x (lambda path). The winner minimizes mean
// validation MSE; ties go to the larger lambda, then the smaller J.
CvResult cross_validate(const Dataset& data, const FitConfig& cfg);

// Normalizes, builds the index and design, and solves. When cfg.cv is set,
// J and lambda come from cross_validate first.
SieveModel fit_sieve(const Dataset& data, const FitConfig& cfg);

Eigen::VectorXd predict(const SieveModel& model, const Eigen::MatrixXd& features);

// Versioned JSON; doubles are written as shortest round-trip decimals.
void save_model(const SieveModel& model, const std::filesystem::path& path);
SieveModel load_model(const std::filesystem::path& path);
std::string model_to_json(const SieveModel& model);
SieveModel model_from_json(const std::string& text);

}  // namespace sieve
