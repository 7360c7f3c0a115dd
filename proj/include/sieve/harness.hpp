#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sieve/basis.hpp"
#include "sieve/simulate.hpp"

namespace sieve {

enum class Method { SieveOls, SieveLasso, SieveAdditive, Krr, KrrOracle };

// "sieve-ols" | "sieve-lasso" | "sieve-additive" | "krr" | "krr-oracle"
std::string_view to_string(Method m);
Method method_from_string(std::string_view name);
std::vector<Method> parse_methods(std::string_view comma_list);

struct BenchConfig {
  std::vector<Method> methods{Method::SieveLasso};
  BasisKind basis = BasisKind::Cosine;
  // Interaction order for sieve-ols and sieve-lasso; sieve-additive uses 1.
  int d_prime = 2;
  int cv_folds = 5;
  int n_lambda = 20;
  double lambda_decades = 3.0;
  // J grid is {J0/2, J0, 2 J0} scaled by these factors, J0 from the default rule.
  std::vector<double> j_factors{0.5, 1.0, 2.0};
  std::vector<double> krr_ridges{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
  std::uint64_t cv_seed = 20240611;
};

// Fits one method on `train` (CV on folds from cfg.cv_seed) and scores it on
// `test`. `oracle_dims` lists the truly active coordinates for krr-oracle.
Metrics run_method(Method method, const Dataset& train, const Dataset& test, const BenchConfig& cfg,
                   const std::vector<int>& oracle_dims = {});

struct SimulationRow {
  std::string method;
  SimulationSpec spec;
  Metrics metrics;
};

// Runs every method on `replicates` datasets with seeds spec.seed, spec.seed+1, ...
std::vector<SimulationRow> run_simulation(const SimulationSpec& spec, int replicates,
                                          const BenchConfig& cfg);

// method,truth,d,D,n,snr,seed,mse,r2  (r2 empty when undefined)
void write_simulation_csv(std::ostream& out, const std::vector<SimulationRow>& rows);

// Ridge selection for KRR: k-fold CV (same fold rule as the sieve) over the
// ridge grid; returns the ridge with the smallest mean validation MSE.
double krr_select_ridge(const Dataset& train, const std::vector<double>& ridges, int folds,
                        std::uint64_t seed, const std::vector<int>& active_dims);

}  // namespace sieve
