// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cli.hpp"
#include "sieve/basis.hpp"
#include "sieve/csv.hpp"
#include "sieve/divisor.hpp"
#include "sieve/harness.hpp"
#include "sieve/index.hpp"
#include "sieve/kernel.hpp"
#include "sieve/model.hpp"
#include "sieve/simulate.hpp"
#include "sieve/solvers.hpp"

using namespace sieve;
using Row = std::vector<std::uint32_t>;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, pattern, a, b, c);
  return buf;
}

Eigen::MatrixXd uniform_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = u(rng);
  return m;
}

std::uint64_t tau_brute(int D, std::uint64_t n) {
  if (D == 1) return 1;
  std::uint64_t count = 0;
  for (std::uint64_t f = 1; f <= n; ++f)
    if (n % f == 0) count += tau_brute(D - 1, n / f);
  return count;
}

Outcome index_fixture() {
  // Reference listing, rows 1-30; rows 14-16 are the (5,1,1) permutations.
  const std::vector<Row> expected{
      {1, 1, 1}, {2, 1, 1}, {1, 2, 1}, {1, 1, 2}, {3, 1, 1}, {1, 3, 1}, {1, 1, 3}, {4, 1, 1},
      {1, 4, 1}, {1, 1, 4}, {2, 2, 1}, {2, 1, 2}, {1, 2, 2}, {5, 1, 1}, {1, 5, 1}, {1, 1, 5},
      {6, 1, 1}, {1, 6, 1}, {1, 1, 6}, {2, 3, 1}, {2, 1, 3}, {1, 2, 3}, {3, 2, 1}, {3, 1, 2},
      {1, 3, 2}, {7, 1, 1}, {1, 7, 1}, {1, 1, 7}, {8, 1, 1}, {1, 8, 1}};
  const auto m = generate_index_matrix(3, 3, 8);
  if (m.rows() < 30) return {false, "only " + std::to_string(m.rows()) + " rows"};
  int mismatches = 0;
  for (std::size_t i = 0; i < 30; ++i) {
    const Row got(m.row(i).begin(), m.row(i).end());
    mismatches += got != expected[i];
  }
  return {mismatches == 0, std::to_string(mismatches) + " of 30 rows differ"};
}

Outcome divisor_identities() {
  bool ok = tau(2, 4) == 3 && tau(2, 6) == 4;
  int brute_bad = 0;
  for (int D = 1; D <= 4; ++D)
    for (std::uint64_t n = 1; n <= 200; ++n) brute_bad += tau(D, n) != tau_brute(D, n);
  int rec_bad = 0;
  for (int D = 2; D <= 4; ++D) {
    std::vector<std::uint64_t> prev(501);
    for (std::uint64_t m = 1; m <= 500; ++m) prev[m] = big_t(D - 1, m);
    for (std::uint64_t x = 1; x <= 500; ++x) {
      std::uint64_t sum = 0;
      for (std::uint64_t n = 1; n <= x; ++n) sum += prev[x / n];
      rec_bad += big_t(D, x) != sum;
    }
  }
  ok = ok && brute_bad == 0 && rec_bad == 0;
  return {ok, "tau_2(4)=" + std::to_string(tau(2, 4)) + " tau_2(6)=" + std::to_string(tau(2, 6)) +
                  ", brute-force mismatches " + std::to_string(brute_bad) + ", recurrence mismatches " +
                  std::to_string(rec_bad)};
}

Outcome magnitude() {
  const auto m = index_matrix_for_count(2, 2, 100000);
  double lo = 1e300, hi = 0.0;
  for (std::size_t j = 100; j <= 100000; ++j) {
    const double r = static_cast<double>(m.c(j - 1)) * std::log(static_cast<double>(j)) / static_cast<double>(j);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  const double x = 1e5, lx = std::log(x);
  const double avg2 = static_cast<double>(big_t(2, 100000)) / (x * lx);
  const double avg3 = static_cast<double>(big_t(3, 100000)) * 2.0 / (x * lx * lx);
  const bool ok = lo >= 0.1 && hi <= 10.0 && std::abs(avg2 - 1.0) <= 0.5 && std::abs(avg3 - 1.0) <= 0.5;
  return {ok, fmt("c_j log j / j in [%.3f, %.3f]", lo, hi) + fmt("; average-order ratios D=2 %.3f, D=3 %.3f", avg2, avg3)};
}

Outcome exact_recovery() {
  Dataset data;
  data.features.resize(200, 1);
  data.outcome.resize(200);
  for (int i = 0; i < 200; ++i) {
    const double x = i / 199.0;
    data.features(i, 0) = x;
    data.outcome(i) = std::cos(std::numbers::pi * x);
  }
  FitConfig cfg;
  cfg.estimator = Estimator::Ols;
  cfg.J = 5;
  const auto model = fit_sieve(data, cfg);
  const auto& b = model.beta();
  const double err2 = std::abs(b(1) - 1.0 / std::numbers::sqrt2);
  double others = 0.0;
  for (int j : {0, 2, 3, 4}) others = std::max(others, std::abs(b(j)));
  return {err2 <= 1e-8 && others <= 1e-8, fmt("|beta_2 - 1/sqrt2| = %.2e, max other |beta_j| = %.2e", err2, others)};
}

Outcome lasso_correctness() {
  double worst_kkt = 0.0;
  int nonzero_above = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Eigen::MatrixXd x = uniform_matrix(100, 50, seed, -1.0, 1.0);
    const Eigen::VectorXd y = uniform_matrix(100, 1, seed + 10000, -1.0, 1.0).col(0);
    const double lmax = lambda_max(x, y);
    const double fractions[] = {0.5, 0.1, 0.02, 0.005};
    LassoConfig cfg;
    cfg.lambda = fractions[seed % 4] * lmax;
    const auto fit = lasso_fit(x, y, cfg);
    const double kkt = fit.converged ? kkt_residual(x, y, fit.beta, cfg.lambda) : 1e300;
    worst_kkt = std::max(worst_kkt, kkt);
    cfg.lambda = 1.01 * lmax;
    nonzero_above += lasso_fit(x, y, cfg).beta != Eigen::VectorXd::Zero(50);
  }

  double ols_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::MatrixXd x = uniform_matrix(80, 6, seed + 200, -1.0, 1.0);
    const Eigen::VectorXd y = uniform_matrix(80, 1, seed + 300, -1.0, 1.0).col(0);
    LassoConfig cfg;
    cfg.tol = 1e-10;
    const Eigen::VectorXd oracle = x.householderQr().solve(y);
    ols_gap = std::max(ols_gap, (lasso_fit(x, y, cfg).beta - oracle).cwiseAbs().maxCoeff());
  }

  // Cosine columns on midpoints are exactly orthonormal in-sample.
  Eigen::MatrixXd q(8, 3);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 3; ++j) q(i, j) = eval_basis(BasisKind::Cosine, j + 1, (i + 0.5) / 8.0);
  double soft_gap = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Eigen::VectorXd y = uniform_matrix(8, 1, seed + 400, -2.0, 2.0).col(0);
    const Eigen::VectorXd z = q.transpose() * y / 8.0;
    for (double lambda : {0.05, 0.3, 1.0}) {
      LassoConfig cfg;
      cfg.lambda = lambda;
      const auto fit = lasso_fit(q, y, cfg);
      for (int j = 0; j < 3; ++j) {
        const double t = lambda / 2.0;
        const double s = z(j) > t ? z(j) - t : (z(j) < -t ? z(j) + t : 0.0);
        soft_gap = std::max(soft_gap, std::abs(fit.beta(j) - s));
      }
    }
  }
  const bool ok = worst_kkt <= 1e-6 && nonzero_above == 0 && ols_gap <= 1e-6 && soft_gap <= 1e-8;
  return {ok, fmt("max KKT %.2e over 50 instances; ", worst_kkt) + std::to_string(nonzero_above) +
                  " nonzero solutions at 1.01 lambda_max" + fmt("; lambda=0 vs QR %.2e; soft-threshold gap %.2e", ols_gap, soft_gap)};
}

Outcome rate_check() {
  RateConfig cfg;
  cfg.n_list = {200, 400, 800, 1600, 3200, 6400, 12800};
  cfg.truth = RateTruth::AbsKink;
  cfg.snr = 3.0;
  cfg.replicates = 10;
  const auto r = rate_experiment(cfg);
  return {r.slope_valid && r.slope >= -0.9 && r.slope <= -0.45, fmt("log-log MSE slope %.4f (band [-0.9, -0.45])", r.slope)};
}

double mean_r2(const std::vector<SimulationRow>& rows, const std::string& method) {
  double sum = 0.0;
  int count = 0;
  for (const auto& row : rows) {
    if (row.method != method || !row.metrics.r2) continue;
    sum += *row.metrics.r2;
    ++count;
  }
  return count ? sum / count : std::nan("");
}

Outcome interaction_separation() {
  SimulationSpec spec;
  spec.truth = Truth::Interaction;
  spec.d = 4;
  spec.D = 2;
  spec.n_train = 2000;
  spec.snr = 30.0;
  spec.seed = 1;
  BenchConfig cfg;
  cfg.methods = {Method::SieveLasso, Method::SieveAdditive};
  const auto rows = run_simulation(spec, 10, cfg);
  const double lasso = mean_r2(rows, "sieve-lasso");
  const double additive = mean_r2(rows, "sieve-additive");
  return {additive <= 0.1 && lasso >= additive + 0.2,
          fmt("mean test R2: additive %.4f, penalized D'=2 %.4f", additive, lasso)};
}

Outcome sparsity_robustness() {
  SimulationSpec spec;
  spec.truth = Truth::Poly;
  spec.D = 2;
  spec.n_train = 1000;
  spec.snr = 3.0;
  spec.seed = 1;
  BenchConfig cfg;
  cfg.methods = {Method::SieveLasso};
  spec.d = 20;
  const double wide = mean_r2(run_simulation(spec, 10, cfg), "sieve-lasso");
  spec.d = 2;
  const double oracle = mean_r2(run_simulation(spec, 10, cfg), "sieve-lasso");
  return {std::abs(oracle - wide) <= 0.15, fmt("mean test R2: d=20 %.4f, d=2 %.4f, gap %.4f", wide, oracle, oracle - wide)};
}

Outcome mercer_agreement() {
  double worst = 0.0;
  for (int a = 0; a < 20; ++a) {
    for (int b = 0; b < 20; ++b) {
      const double s = a / 19.0, t = b / 19.0;
      worst = std::max(worst, std::abs(w1_kernel(s, t) - w1_kernel_mercer(s, t, 10000)));
    }
  }
  double min_eig = 1e300;
  for (int n : {2, 10, 50, 100, 200}) {
    for (int d : {1, 3, 5}) {
      const Eigen::MatrixXd x = uniform_matrix(n, d, static_cast<std::uint64_t>(n * 10 + d), 0.0, 1.0);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram_matrix(x), Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
    }
  }
  return {worst <= 1e-3 && min_eig >= -1e-8, fmt("max |closed form - expansion| %.2e; min Gram eigenvalue %.2e", worst, min_eig)};
}

Outcome persistence() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sieve_acceptance";
  fs::create_directories(dir);

  SimulationSpec spec;
  spec.truth = Truth::Poly;
  spec.d = 3;
  spec.D = 2;
  spec.n_train = 400;
  spec.seed = 11;
  const auto sim = generate_dataset(spec);
  FitConfig cfg;
  cfg.d_prime = 2;
  const auto model = fit_sieve(sim.train, cfg);
  save_model(model, dir / "model.json");
  const auto loaded = load_model(dir / "model.json");
  const Eigen::MatrixXd probe = uniform_matrix(1000, 3, 99, -0.1, 1.1);
  const Eigen::VectorXd a = predict(model, probe);
  const Eigen::VectorXd b = predict(loaded, probe);
  const bool identical = std::memcmp(a.data(), b.data(), sizeof(double) * 1000) == 0;

  const fs::path csv = dir / "train.csv";
  {
    std::ofstream f(csv);
    write_dataset_csv(f, sim.train, "y");
  }
  std::ostringstream out, err;
  const int fit_code = cli::run({"fit", "--data", csv.string(), "--outcome", "y", "--dprime", "2", "--out",
                                 (dir / "cli_model.json").string()},
                                out, err);
  const int pred_code = cli::run({"predict", "--model", (dir / "cli_model.json").string(), "--data", csv.string(),
                                  "--outcome", "y", "--out", (dir / "pred.csv").string()},
                                 out, err);
  int mismatches = -1;
  if (fit_code == 0 && pred_code == 0) {
    const auto table = read_csv(dir / "pred.csv");
    const auto train = dataset_from_table(read_csv(csv), "y");
    const auto cli_model = load_model(dir / "cli_model.json");
    const Eigen::VectorXd fitted = predict(cli_model, train.features);
    mismatches = static_cast<int>(table.rows.size() != static_cast<std::size_t>(fitted.size()));
    for (std::size_t i = 0; i < table.rows.size() && i < static_cast<std::size_t>(fitted.size()); ++i) {
      mismatches += table.rows[i][0] != fitted(static_cast<Eigen::Index>(i));
    }
  }
  fs::remove_all(dir);
  return {identical && mismatches == 0,
          std::string("round-trip predictions ") + (identical ? "bit-identical" : "DIFFER") +
              "; CLI exit codes " + std::to_string(fit_code) + "/" + std::to_string(pred_code) +
              ", fitted-value mismatches " + std::to_string(mismatches)};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria{
      {"1 index-matrix fixture", index_fixture},
      {"2 divisor identities", divisor_identities},
      {"3 magnitude property", magnitude},
      {"4 exact recovery", exact_recovery},
      {"5 lasso correctness", lasso_correctness},
      {"6 rate check", rate_check},
      {"7 interaction separation", interaction_separation},
      {"8 sparsity robustness", sparsity_robustness},
      {"9 Mercer agreement", mercer_agreement},
      {"10 persistence", persistence},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.pass;
    std::printf("%s criterion %-26s %s (%.1fs)\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
