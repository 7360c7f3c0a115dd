#include "sieve/simulate.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <string>

#include "sieve/design.hpp"
#include "sieve/error.hpp"
#include "sieve/index.hpp"
#include "sieve/parallel.hpp"
#include "sieve/solvers.hpp"

namespace sieve {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(id + 0x51ED2701ULL)));
}

constexpr std::uint64_t kTrainStream = 1;
constexpr std::uint64_t kTestStream = 2;
constexpr std::uint64_t kNormStream = 3;
constexpr std::size_t kNormDraws = 100'000;

void check_point(std::span<const double> x, int D, int min_D) {
  if (D < min_D) throw DomainError("truth requires D >= " + std::to_string(min_D));
  if (x.size() < static_cast<std::size_t>(D)) throw DomainError("point has fewer than D coordinates");
}

const IndexMatrix& cos_truth_index(int D) {
  static std::mutex mu;
  static std::map<int, IndexMatrix> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(D);
  if (it == cache.end()) it = cache.emplace(D, generate_index_matrix(D, D, 8)).first;
  return it->second;
}

}  // namespace

std::string_view to_string(Truth truth) {
  switch (truth) {
    case Truth::Poly: return "poly";
    case Truth::Cos: return "cos";
    case Truth::Interaction: return "interaction";
  }
  return "poly";
}

Truth truth_from_string(std::string_view name) {
  if (name == "poly") return Truth::Poly;
  if (name == "cos") return Truth::Cos;
  if (name == "interaction") return Truth::Interaction;
  throw DomainError("unknown truth: " + std::string(name));
}

double legendre(double x, int j) {
  switch (j) {
    case 2: return x;
    case 3: return (3.0 * x * x - 1.0) / 2.0;
    default: throw DomainError("legendre: only degrees j = 2, 3 are supported");
  }
}

double truth_poly(std::span<const double> x, int D) {
  check_point(x, D, 2);
  double f = 0.0;
  for (int k = 0; k + 1 < D; ++k) {
    const double u = 2.0 * (x[static_cast<std::size_t>(k)] - 0.5);
    const double v = 2.0 * (x[static_cast<std::size_t>(k) + 1] - 0.5);
    f += legendre(u, 3) + legendre(u, 2) * legendre(v, 2);
  }
  return f;
}

double truth_interaction(std::span<const double> x, int D) {
  check_point(x, D, 2);
  double f = 0.0;
  for (int k = 0; k + 1 < D; ++k) {
    const double u = 2.0 * (x[static_cast<std::size_t>(k)] - 0.5);
    const double v = 2.0 * (x[static_cast<std::size_t>(k) + 1] - 0.5);
    f += legendre(u, 2) * legendre(v, 3);
  }
  return f;
}

double truth_cos(std::span<const double> x, int D) {
  check_point(x, D, 1);
  const IndexMatrix& index = cos_truth_index(D);
  double f = 0.0;
  for (std::size_t r = 0; r < index.rows(); ++r) {
    auto row = index.row(r);
    double p = 1.0;
    for (int k = 0; k < D; ++k) {
      p *= std::cos((row[static_cast<std::size_t>(k)] - 1.0) * std::numbers::pi * x[static_cast<std::size_t>(k)]);
    }
    f += p;
  }
  return f;
}

double eval_truth(Truth truth, std::span<const double> x, int D) {
  switch (truth) {
    case Truth::Poly: return truth_poly(x, D);
    case Truth::Cos: return truth_cos(x, D);
    case Truth::Interaction: return truth_interaction(x, D);
  }
  return 0.0;
}

double truth_sq_norm(Truth truth, int D) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, double> cache;
  const auto key = std::make_pair(static_cast<int>(truth), D);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto rng = stream(0xC0FFEEULL, kNormStream);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(D));
  std::vector<double> sq(kNormDraws);
  for (std::size_t i = 0; i < kNormDraws; ++i) {
    for (auto& v : x) v = unif(rng);
    const double f = eval_truth(truth, x, D);
    sq[i] = f * f;
  }
  const double value = compensated_sum(sq) / static_cast<double>(kNormDraws);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, value);
  return value;
}

void SimulationSpec::validate() const {
  if (d < 1) throw DomainError("simulation: d must be >= 1");
  if (D < 1 || D > d) throw DomainError("simulation: need 1 <= D <= d");
  if ((truth == Truth::Poly || truth == Truth::Interaction) && D < 2) {
    throw DomainError("simulation: the " + std::string(to_string(truth)) + " truth needs D >= 2");
  }
  if (n_train < 2) throw DomainError("simulation: n_train must be >= 2");
  if (n_test < 1) throw DomainError("simulation: n_test must be >= 1");
  if (!(snr > 0.0) || !std::isfinite(snr)) throw DomainError("simulation: snr must be positive");
}

SimulatedData generate_dataset(const SimulationSpec& spec) {
  spec.validate();
  SimulatedData out;
  out.noise_sd = std::sqrt(truth_sq_norm(spec.truth, spec.D) / spec.snr);

  auto fill = [&](std::size_t n, std::uint64_t id, Dataset& data, Eigen::VectorXd* truth_out) {
    auto rng = stream(spec.seed, id);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    data.features.resize(static_cast<Eigen::Index>(n), spec.d);
    data.outcome.resize(static_cast<Eigen::Index>(n));
    if (truth_out != nullptr) truth_out->resize(static_cast<Eigen::Index>(n));
    std::vector<double> x(static_cast<std::size_t>(spec.d));
    for (std::size_t i = 0; i < n; ++i) {
      for (auto& v : x) v = unif(rng);
      const double f = eval_truth(spec.truth, x, spec.D);
      const auto row = static_cast<Eigen::Index>(i);
      for (int k = 0; k < spec.d; ++k) data.features(row, k) = x[static_cast<std::size_t>(k)];
      data.outcome(row) = f + out.noise_sd * noise(rng);
      if (truth_out != nullptr) (*truth_out)(row) = f;
    }
    for (int k = 0; k < spec.d; ++k) data.feature_names.push_back("x" + std::to_string(k + 1));
  };
  fill(spec.n_train, kTrainStream, out.train, nullptr);
  fill(spec.n_test, kTestStream, out.test, &out.test_truth);
  return out;
}

Metrics evaluate(const Eigen::VectorXd& predictions, const Eigen::VectorXd& outcome) {
  if (outcome.size() < 1) throw InputError("evaluate: empty test set");
  if (predictions.size() != outcome.size()) throw InputError("evaluate: prediction length mismatch");
  const auto m = static_cast<std::size_t>(outcome.size());
  std::vector<double> sq(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double e = predictions(static_cast<Eigen::Index>(i)) - outcome(static_cast<Eigen::Index>(i));
    sq[i] = e * e;
  }
  Metrics out;
  out.mse = compensated_sum(sq) / static_cast<double>(m);
  const double mean = outcome.mean();
  for (std::size_t i = 0; i < m; ++i) {
    const double c = outcome(static_cast<Eigen::Index>(i)) - mean;
    sq[i] = c * c;
  }
  const double var = compensated_sum(sq) / static_cast<double>(m);
  if (var > 0.0) out.r2 = 1.0 - out.mse / var;
  return out;
}

Metrics evaluate(const SieveModel& model, const Dataset& test) {
  return evaluate(predict(model, test.features), test.outcome);
}

double rate_truth_value(RateTruth truth, double x) {
  switch (truth) {
    case RateTruth::AbsKink: return std::abs(x - 0.5);
    case RateTruth::InSpan:
      return 0.5 + std::cos(std::numbers::pi * x) - 0.25 * std::cos(3.0 * std::numbers::pi * x);
    case RateTruth::Zero: return 0.0;
  }
  return 0.0;
}

RateResult rate_experiment(const RateConfig& cfg) {
  if (cfg.n_list.size() < 2) throw DomainError("rate experiment needs at least two sample sizes");
  if (cfg.replicates < 1) throw DomainError("rate experiment needs at least one replicate");

  double noise_sd = 0.0;
  if (cfg.truth == RateTruth::Zero) {
    noise_sd = cfg.zero_truth_noise_sd;
  } else {
    auto rng = stream(0xC0FFEEULL, kNormStream);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<double> sq(kNormDraws);
    for (auto& v : sq) {
      const double f = rate_truth_value(cfg.truth, unif(rng));
      v = f * f;
    }
    noise_sd = std::sqrt(compensated_sum(sq) / static_cast<double>(kNormDraws) / cfg.snr);
  }
  noise_sd *= cfg.noise_scale;

  const std::size_t n_sizes = cfg.n_list.size();
  const auto reps = static_cast<std::size_t>(cfg.replicates);
  std::vector<double> mse(n_sizes * reps, 0.0);

  parallel_for(n_sizes * reps, [&](std::size_t task) {
    const std::size_t s = task / reps;
    const std::size_t r = task % reps;
    const std::size_t n = cfg.n_list[s];
    auto rng = stream(cfg.seed, 1000 * (s + 1) + r);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 1);
    Eigen::VectorXd y(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      x(i, 0) = unif(rng);
      y(i) = rate_truth_value(cfg.truth, x(i, 0)) + noise_sd * noise(rng);
    }
    const auto J = static_cast<std::size_t>(std::ceil(std::cbrt(static_cast<double>(n))));
    auto index = std::make_shared<const IndexMatrix>(index_matrix_for_count(1, 1, J));
    const DesignMatrix design = build_design(x, BasisKind::Cosine, index);
    const SolveResult fit = ols_fit(design.values(), y);

    Eigen::MatrixXd xt(static_cast<Eigen::Index>(cfg.n_eval), 1);
    Eigen::VectorXd ft(static_cast<Eigen::Index>(cfg.n_eval));
    for (Eigen::Index i = 0; i < xt.rows(); ++i) {
      xt(i, 0) = unif(rng);
      ft(i) = rate_truth_value(cfg.truth, xt(i, 0));
    }
    const DesignMatrix test_design = build_design(xt, BasisKind::Cosine, index);
    mse[task] = evaluate(apply_coefficients(test_design.values(), fit.beta), ft).mse;
  });

  RateResult out;
  std::vector<double> log_n, log_mse;
  bool floor_hit = false;
  for (std::size_t s = 0; s < n_sizes; ++s) {
    const double mean = compensated_sum(std::span<const double>(mse.data() + s * reps, reps)) /
                        static_cast<double>(reps);
    out.mean_mse.push_back(mean);
    if (!(mean > 1e-24)) floor_hit = true;
    log_n.push_back(std::log(static_cast<double>(cfg.n_list[s])));
    log_mse.push_back(std::log(std::max(mean, 1e-300)));
  }
  out.slope_valid = !floor_hit;
  if (out.slope_valid) out.slope = ols_slope(log_n, log_mse);
  return out;
}

double ols_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw DomainError("ols_slope: need >= 2 paired values");
  const double nx = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nx;
  my /= nx;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw DomainError("ols_slope: x values are constant");
  return sxy / sxx;
}

double compensated_sum(std::span<const double> values) {
  double sum = 0.0;
  double comp = 0.0;
  for (double v : values) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  return sum + comp;
}

}  // namespace sieve
