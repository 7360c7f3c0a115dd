#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "sieve/model.hpp"

namespace sieve {

enum class Truth { Poly, Cos, Interaction };

std::string_view to_string(Truth truth);
Truth truth_from_string(std::string_view name);

// Leg(x,2) = x, Leg(x,3) = (3x^2 - 1)/2 on [-1,1].
double legendre(double x, int j);

// Truths on [0,1]^d that depend only on the first D coordinates; u = 2x - 1.
//   poly:        sum_{k<D} Leg(u_k,3) + Leg(u_k,2) Leg(u_{k+1},2)
//   cos:         sum over D-tuples j with prod j <= 8 of prod_k cos((j_k - 1) pi x_k)
//   interaction: sum_{k<D} Leg(u_k,2) Leg(u_{k+1},3)
double truth_poly(std::span<const double> x, int D);
double truth_cos(std::span<const double> x, int D);
double truth_interaction(std::span<const double> x, int D);
double eval_truth(Truth truth, std::span<const double> x, int D);

// E[f^2] under the uniform distribution, by Monte Carlo over 10^5 draws with
// a fixed seed. Cached per (truth, D).
double truth_sq_norm(Truth truth, int D);

struct SimulationSpec {
  Truth truth = Truth::Poly;
  int d = 4;
  int D = 2;
  std::size_t n_train = 400;
  std::size_t n_test = 2000;
  double snr = 3.0;
  std::uint64_t seed = 1;

  // Throws DomainError on inconsistent fields.
  void validate() const;
};

struct SimulatedData {
  Dataset train;
  Dataset test;
  Eigen::VectorXd test_truth;  // f0 at the test features, no noise
  double noise_sd = 0.0;
};

// Uniform features on [0,1]^d and Gaussian noise with variance
// truth_sq_norm / snr. Train and test use independent streams of `seed`.
SimulatedData generate_dataset(const SimulationSpec& spec);

struct Metrics {
  double mse = 0.0;
  std::optional<double> r2;  // empty when the test outcome has zero variance
};

// mse = mean (pred - y)^2; r2 = 1 - mse / var(y) with var dividing by m.
Metrics evaluate(const Eigen::VectorXd& predictions, const Eigen::VectorXd& outcome);
Metrics evaluate(const SieveModel& model, const Dataset& test);

// Convergence-rate experiment for univariate least-squares sieves with
// J_n = ceil(n^(1/3)). Test error is measured against the noiseless truth.
enum class RateTruth {
  AbsKink,  // |x - 0.5|
  InSpan,   // 0.5 + cos(pi x) - 0.25 cos(3 pi x)
  Zero,     // f = 0, pure noise
};

struct RateConfig {
  std::vector<std::size_t> n_list;
  RateTruth truth = RateTruth::AbsKink;
  double snr = 3.0;
  // Noise sd when the truth is identically zero (snr is undefined).
  double zero_truth_noise_sd = 1.0;
  double noise_scale = 1.0;  // multiplies the snr-derived noise sd; 0 = noiseless
  int replicates = 10;
  std::size_t n_eval = 2000;
  std::uint64_t seed = 7;
};

struct RateResult {
  std::vector<double> mean_mse;  // per n, averaged over replicates
  double slope = 0.0;            // least-squares slope of log mse on log n
  bool slope_valid = false;      // false when errors sit at the rounding floor
};

double rate_truth_value(RateTruth truth, double x);
RateResult rate_experiment(const RateConfig& cfg);

// Least-squares slope of y on x.
double ols_slope(std::span<const double> x, std::span<const double> y);

// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

}  // namespace sieve
