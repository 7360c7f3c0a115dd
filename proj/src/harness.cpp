#include "sieve/harness.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sieve/csv.hpp"
#include "sieve/error.hpp"
#include "sieve/kernel.hpp"
#include "sieve/parallel.hpp"

namespace sieve {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::SieveOls: return "sieve-ols";
    case Method::SieveLasso: return "sieve-lasso";
    case Method::SieveAdditive: return "sieve-additive";
    case Method::Krr: return "krr";
    case Method::KrrOracle: return "krr-oracle";
  }
  return "sieve-lasso";
}

Method method_from_string(std::string_view name) {
  for (Method m : {Method::SieveOls, Method::SieveLasso, Method::SieveAdditive, Method::Krr, Method::KrrOracle}) {
    if (to_string(m) == name) return m;
  }
  throw DomainError("unknown method: " + std::string(name));
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t comma = list.find(',', start);
    const std::size_t end = comma == std::string_view::npos ? list.size() : comma;
    const std::string_view item = list.substr(start, end - start);
    if (!item.empty()) out.push_back(method_from_string(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (out.empty()) throw DomainError("no methods given");
  return out;
}

double krr_select_ridge(const Dataset& train, const std::vector<double>& ridges, int folds,
                        std::uint64_t seed, const std::vector<int>& active_dims) {
  if (ridges.empty()) throw DomainError("KRR ridge grid is empty");
  if (ridges.size() == 1) return ridges.front();
  const auto n = static_cast<std::size_t>(train.n());
  const std::vector<int> label = assign_folds(n, folds, seed);
  const Eigen::MatrixXd gram = gram_matrix(train.features, active_dims);

  std::vector<std::vector<double>> fold_mse(static_cast<std::size_t>(folds),
                                            std::vector<double>(ridges.size(), 0.0));
  parallel_for(static_cast<std::size_t>(folds), [&](std::size_t fold) {
    std::vector<Eigen::Index> tr, va;
    for (std::size_t i = 0; i < n; ++i) {
      (static_cast<std::size_t>(label[i]) == fold ? va : tr).push_back(static_cast<Eigen::Index>(i));
    }
    const auto nt = static_cast<Eigen::Index>(tr.size());
    Eigen::MatrixXd k_tt(nt, nt), k_vt(static_cast<Eigen::Index>(va.size()), nt);
    Eigen::VectorXd y_t(nt), y_v(static_cast<Eigen::Index>(va.size()));
    for (Eigen::Index a = 0; a < nt; ++a) {
      y_t(a) = train.outcome(tr[static_cast<std::size_t>(a)]);
      for (Eigen::Index b = 0; b < nt; ++b) k_tt(a, b) = gram(tr[static_cast<std::size_t>(a)], tr[static_cast<std::size_t>(b)]);
    }
    for (std::size_t a = 0; a < va.size(); ++a) {
      y_v(static_cast<Eigen::Index>(a)) = train.outcome(va[a]);
      for (Eigen::Index b = 0; b < nt; ++b) k_vt(static_cast<Eigen::Index>(a), b) = gram(va[a], tr[static_cast<std::size_t>(b)]);
    }
    // One eigendecomposition serves the whole ridge grid.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(k_tt);
    const Eigen::VectorXd qty = eig.eigenvectors().transpose() * y_t;
    const Eigen::MatrixXd kq = k_vt * eig.eigenvectors();
    for (std::size_t r = 0; r < ridges.size(); ++r) {
      const double shift = static_cast<double>(nt) * ridges[r];
      const Eigen::VectorXd coef = qty.array() / (eig.eigenvalues().array().max(0.0) + shift);
      fold_mse[fold][r] = (kq * coef - y_v).squaredNorm() / static_cast<double>(va.size());
    }
  });

  std::size_t best = 0;
  double best_mse = INFINITY;
  for (std::size_t r = 0; r < ridges.size(); ++r) {
    double total = 0.0;
    for (const auto& f : fold_mse) total += f[r];
    // Ties keep the earlier (larger) ridge.
    if (total < best_mse) {
      best_mse = total;
      best = r;
    }
  }
  return ridges[best];
}

Metrics run_method(Method method, const Dataset& train, const Dataset& test, const BenchConfig& cfg,
                   const std::vector<int>& oracle_dims) {
  const auto n = static_cast<std::size_t>(train.n());
  const int d = static_cast<int>(train.d());
  switch (method) {
    case Method::SieveOls:
    case Method::SieveLasso:
    case Method::SieveAdditive: {
      FitConfig fc;
      fc.basis = cfg.basis;
      fc.estimator = method == Method::SieveOls ? Estimator::Ols : Estimator::Penalized;
      fc.d_prime = method == Method::SieveAdditive ? 1 : std::min(cfg.d_prime, d);
      const std::size_t j0 = default_hyperparams(n, d, fc.d_prime).J;
      CvConfig cv;
      cv.folds = cfg.cv_folds;
      cv.n_lambda = cfg.n_lambda;
      cv.decades = cfg.lambda_decades;
      cv.seed = cfg.cv_seed;
      for (double f : cfg.j_factors) {
        auto J = static_cast<std::size_t>(std::llround(f * static_cast<double>(j0)));
        J = std::clamp<std::size_t>(J, 1, 50 * n);
        cv.j_grid.push_back(J);
      }
      fc.J = j0;
      fc.cv = cv;
      const SieveModel model = fit_sieve(train, fc);
      return evaluate(model, test);
    }
    case Method::Krr:
    case Method::KrrOracle: {
      std::vector<int> dims;
      if (method == Method::KrrOracle) {
        if (oracle_dims.empty()) throw DomainError("krr-oracle needs the active dimensions");
        dims = oracle_dims;
      }
      const double ridge = krr_select_ridge(train, cfg.krr_ridges, cfg.cv_folds, cfg.cv_seed, dims);
      const KrrModel model = krr_fit(train.features, train.outcome, ridge, dims);
      return evaluate(model.predict(test.features), test.outcome);
    }
  }
  throw DomainError("unhandled method");
}

std::vector<SimulationRow> run_simulation(const SimulationSpec& spec, int replicates,
                                          const BenchConfig& cfg) {
  spec.validate();
  if (replicates < 1) throw DomainError("replicates must be >= 1");
  std::vector<int> oracle(static_cast<std::size_t>(spec.D));
  for (int k = 0; k < spec.D; ++k) oracle[static_cast<std::size_t>(k)] = k;

  const std::size_t reps = static_cast<std::size_t>(replicates);
  const std::size_t n_methods = cfg.methods.size();
  std::vector<SimulationRow> rows(reps * n_methods);
  for (std::size_t r = 0; r < reps; ++r) {
    SimulationSpec s = spec;
    s.seed = spec.seed + r;
    const SimulatedData data = generate_dataset(s);
    for (std::size_t m = 0; m < n_methods; ++m) {
      SimulationRow& row = rows[m * reps + r];
      row.method = std::string(to_string(cfg.methods[m]));
      row.spec = s;
      row.metrics = run_method(cfg.methods[m], data.train, data.test, cfg, oracle);
    }
  }
  return rows;
}

void write_simulation_csv(std::ostream& out, const std::vector<SimulationRow>& rows) {
  out << "method,truth,d,D,n,snr,seed,mse,r2\n";
  for (const auto& row : rows) {
    out << row.method << ',' << to_string(row.spec.truth) << ',' << row.spec.d << ',' << row.spec.D << ','
        << row.spec.n_train << ',' << format_double(row.spec.snr) << ',' << row.spec.seed << ','
        << format_double(row.metrics.mse) << ',';
    if (row.metrics.r2) out << format_double(*row.metrics.r2);
    out << '\n';
  }
}

}  // namespace sieve
