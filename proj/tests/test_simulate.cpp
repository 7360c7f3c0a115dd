#include <cmath>
#include <random>

#include "doctest.h"
#include "sieve/error.hpp"
#include "sieve/divisor.hpp"
#include "sieve/parallel.hpp"
#include "sieve/simulate.hpp"
#include "test_util.hpp"

using namespace sieve;

TEST_CASE("legendre") {
  CHECK(legendre(0.5, 2) == 0.5);
  CHECK(legendre(1.0, 3) == 1.0);
  CHECK(legendre(0.0, 3) == -0.5);
  CHECK_THROWS_AS(legendre(0.5, 4), DomainError);
}

TEST_CASE("truth examples") {
  const std::vector<double> half4(4, 0.5);
  CHECK(truth_poly(half4, 4) == doctest::Approx(-1.5).epsilon(1e-15));
  const std::vector<double> ones3{1.0, 1.0, 1.0};
  CHECK(truth_poly(ones3, 2) == doctest::Approx(2.0).epsilon(1e-15));

  const std::vector<double> zero1{0.0};
  CHECK(truth_cos(zero1, 1) == doctest::Approx(8.0).epsilon(1e-15));
  for (int D = 1; D <= 3; ++D) {
    const std::vector<double> zero(static_cast<std::size_t>(D), 0.0);
    CHECK(truth_cos(zero, D) == static_cast<double>(big_t(D, 8)));
  }
  CHECK(big_t(2, 8) == 20);

  CHECK(truth_interaction(half4, 2) == 0.0);
  const std::vector<double> ones2{1.0, 1.0};
  CHECK(truth_interaction(ones2, 2) == doctest::Approx(1.0).epsilon(1e-15));

  CHECK(truth_from_string("interaction") == Truth::Interaction);
  CHECK(to_string(Truth::Cos) == "cos");
  CHECK_THROWS(truth_from_string("nope"));
}

TEST_CASE("truths ignore coordinates beyond D") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (auto truth : {Truth::Poly, Truth::Cos, Truth::Interaction}) {
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(6);
      for (auto& v : x) v = u(rng);
      const double before = eval_truth(truth, x, 3);
      x[3] = u(rng);
      x[4] = u(rng);
      x[5] = u(rng);
      CHECK(eval_truth(truth, x, 3) == before);
    }
  }
}

TEST_CASE("interaction truth has zero main effects") {
  // E[f | x^k] over bins of x^k, estimated from 1e5 uniform draws.
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int bins = 10;
  std::vector<std::vector<double>> sum(2, std::vector<double>(bins, 0.0));
  std::vector<std::vector<int>> cnt(2, std::vector<int>(bins, 0));
  for (int i = 0; i < 100000; ++i) {
    const std::vector<double> x{u(rng), u(rng)};
    const double f = truth_interaction(x, 2);
    for (int k = 0; k < 2; ++k) {
      const int b = std::min(bins - 1, static_cast<int>(x[static_cast<std::size_t>(k)] * bins));
      sum[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)] += f;
      ++cnt[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)];
    }
  }
  for (int k = 0; k < 2; ++k) {
    for (int b = 0; b < bins; ++b) {
      CHECK(std::abs(sum[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)] /
                     cnt[static_cast<std::size_t>(k)][static_cast<std::size_t>(b)]) <= 0.02);
    }
  }
}

TEST_CASE("squared norms") {
  // Closed forms: E[Leg(u,3)^2] = 1/5, E[u^2] = 1/3 for u uniform on [-1,1].
  CHECK(truth_sq_norm(Truth::Interaction, 2) == doctest::Approx(1.0 / 15.0).epsilon(0.03));
  CHECK(truth_sq_norm(Truth::Poly, 2) == doctest::Approx(1.0 / 5.0 + 1.0 / 9.0).epsilon(0.03));
  CHECK(truth_sq_norm(Truth::Cos, 1) == doctest::Approx(1.0 + 7.0 / 2.0).epsilon(0.03));
  CHECK(truth_sq_norm(Truth::Poly, 2) == truth_sq_norm(Truth::Poly, 2));
}

TEST_CASE("generate_dataset") {
  SimulationSpec spec;
  spec.truth = Truth::Interaction;
  spec.d = 4;
  spec.D = 2;
  spec.n_train = 300;
  spec.n_test = 200;
  spec.seed = 5;
  const auto a = generate_dataset(spec);
  const auto b = generate_dataset(spec);
  CHECK(a.train.features == b.train.features);
  CHECK(a.train.outcome == b.train.outcome);
  CHECK(a.test.outcome == b.test.outcome);
  CHECK(a.train.features.rows() == 300);
  CHECK(a.test.features.rows() == 200);
  CHECK(a.train.features.minCoeff() >= 0.0);
  CHECK(a.train.features.maxCoeff() <= 1.0);
  CHECK(a.train.features.topRows(200) != a.test.features);
  CHECK(a.noise_sd == doctest::Approx(std::sqrt(truth_sq_norm(Truth::Interaction, 2) / 3.0)));
  for (Eigen::Index i = 0; i < a.test.features.rows(); ++i) {
    const Eigen::VectorXd row = a.test.features.row(i);
    CHECK(a.test_truth(i) == eval_truth(spec.truth, {row.data(), 4}, 2));
  }

  spec.snr = 1e9;
  const auto quiet = generate_dataset(spec);
  Eigen::VectorXd noise(300);
  for (Eigen::Index i = 0; i < 300; ++i) {
    const Eigen::VectorXd row = quiet.train.features.row(i);
    noise(i) = quiet.train.outcome(i) - eval_truth(spec.truth, {row.data(), 4}, 2);
  }
  CHECK(noise.squaredNorm() / 300.0 <= 1e-8 * truth_sq_norm(Truth::Interaction, 2));

  spec.snr = 3.0;
  spec.n_train = 100000;
  spec.n_test = 10;
  const auto big = generate_dataset(spec);
  const Eigen::VectorXd y = big.train.outcome;
  const double var = (y.array() - y.mean()).square().mean();
  CHECK(var == doctest::Approx(truth_sq_norm(Truth::Interaction, 2) * (1.0 + 1.0 / 3.0)).epsilon(0.05));

  SimulationSpec bad;
  bad.d = 2;
  bad.D = 3;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.D = 1;
  CHECK_THROWS_AS(bad.validate(), DomainError);
  bad.truth = Truth::Cos;
  CHECK_NOTHROW(bad.validate());
  bad.snr = 0.0;
  CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("evaluate") {
  const Eigen::VectorXd y = test::random_vector(1000, 1);
  const auto perfect = evaluate(y, y);
  CHECK(perfect.mse == 0.0);
  CHECK(*perfect.r2 == 1.0);
  const auto mean = evaluate(Eigen::VectorXd::Constant(1000, y.mean()), y);
  CHECK(std::abs(*mean.r2) <= 1e-12);
  const auto flat = evaluate(Eigen::VectorXd::Zero(4), Eigen::VectorXd::Constant(4, 2.0));
  CHECK(flat.mse == 4.0);
  CHECK_FALSE(flat.r2.has_value());
  CHECK_THROWS(evaluate(Eigen::VectorXd::Zero(0), Eigen::VectorXd::Zero(0)));

  SimulationSpec spec;
  spec.truth = Truth::Interaction;
  spec.D = 2;
  spec.n_test = 20000;
  const auto sim = generate_dataset(spec);
  const auto zero = evaluate(Eigen::VectorXd::Zero(20000), sim.test.outcome);
  CHECK(zero.mse == doctest::Approx(sim.test.outcome.squaredNorm() / 20000.0));
  CHECK(*zero.r2 == doctest::Approx(0.0).epsilon(0.03).scale(1.0));
}

TEST_CASE("compensated sum and slope helpers") {
  std::vector<double> v{1e16, 1.0, -1e16, 1.0};
  CHECK(compensated_sum(v) == 2.0);
  const std::vector<double> x{1.0, 2.0, 3.0, 4.0}, y{3.0, 1.0, -1.0, -3.0};
  CHECK(ols_slope(x, y) == doctest::Approx(-2.0));
}

TEST_CASE("rate experiment special truths") {
  RateConfig in_span;
  in_span.n_list = {64, 128, 256, 512, 2048};
  in_span.truth = RateTruth::InSpan;
  in_span.noise_scale = 0.0;
  in_span.replicates = 2;
  const auto exact = rate_experiment(in_span);
  for (double m : exact.mean_mse) CHECK(m <= 1e-20);
  CHECK_FALSE(exact.slope_valid);

  RateConfig noise;
  noise.n_list = {200, 400, 800, 1600, 3200, 6400};
  noise.truth = RateTruth::Zero;
  const auto pure = rate_experiment(noise);
  CHECK(pure.slope_valid);
  CHECK(pure.slope >= -1.2);
  CHECK(pure.slope <= -0.45);
}

TEST_CASE("simulation results do not depend on the thread count") {
  RateConfig cfg;
  cfg.n_list = {100, 200, 400, 800};
  cfg.replicates = 4;
  set_max_threads(1);
  const auto a = rate_experiment(cfg);
  set_max_threads(3);
  const auto b = rate_experiment(cfg);
  set_max_threads(0);
  CHECK(a.mean_mse == b.mean_mse);
  CHECK(a.slope == b.slope);
}
