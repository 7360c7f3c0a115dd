#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "sieve/csv.hpp"
#include "sieve/error.hpp"
#include "sieve/harness.hpp"
#include "sieve/index.hpp"
#include "sieve/model.hpp"
#include "sieve/parallel.hpp"
#include "sieve/simd.hpp"
#include "sieve/simulate.hpp"

namespace sieve::cli {

namespace {

using nlohmann::json;

struct Common {
  std::size_t threads = 0;
  bool json_out = false;
  bool no_timestamp = false;
  std::string out_path;
};

struct FitArgs {
  std::string data, outcome, basis = "cosine", estimator = "lasso", out;
  int dprime = 1;
  std::size_t J = 0;
  double lambda = 0.0;
  int cv_folds = 0;
  int cv_lambdas = 20;
  std::vector<std::size_t> j_grid;
  std::uint64_t seed = 20240611;
  double holdout = 0.0;
  bool allow_nonconverged = false;
  bool no_intercept_penalty = false;
  double tol = 1e-7;
  int max_sweeps = 10'000;
};

struct PredictArgs {
  std::string model, data, outcome;
};

struct IndexArgs {
  int d = 0;
  int dprime = 0;
  std::uint64_t max_prod = 0;
  std::size_t J = 0;
};

struct SimArgs {
  std::string truth = "poly", methods = "sieve-lasso", basis = "cosine";
  int d = 4, D = 2, dprime = 2, replicates = 1, cv_folds = 5, n_lambda = 20;
  std::size_t n = 400, n_test = 2000;
  double snr = 3.0;
  std::uint64_t seed = 1;
  // bench on user data
  std::string data, outcome;
  double holdout = 0.25;
};

std::string timestamp_line() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << "# generated " << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ") << '\n';
  return s.str();
}

// Writes CSV text to --out or to `out`.
void emit(const Common& c, const std::string& csv, std::ostream& out) {
  const std::string text = (c.no_timestamp ? std::string() : timestamp_line()) + csv;
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path);
  if (!f) throw InputError("cannot open output file: " + c.out_path);
  f << text;
}

void echo_config(std::ostream& err, const json& cfg) { err << "# config: " << cfg.dump() << '\n'; }

// Deterministic holdout split: returns (train rows, holdout rows).
std::pair<std::vector<Eigen::Index>, std::vector<Eigen::Index>> split_rows(std::size_t n, double frac,
                                                                           std::uint64_t seed) {
  if (frac < 0.0 || frac >= 1.0) throw DomainError("--holdout must be in [0, 1)");
  std::vector<Eigen::Index> idx(n);
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed ^ 0x5EEDULL);
  for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[static_cast<std::size_t>(rng() % i)]);
  const auto hold = static_cast<std::size_t>(std::llround(frac * static_cast<double>(n)));
  std::vector<Eigen::Index> test(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(hold));
  std::vector<Eigen::Index> train(idx.begin() + static_cast<std::ptrdiff_t>(hold), idx.end());
  std::sort(test.begin(), test.end());
  std::sort(train.begin(), train.end());
  return {train, test};
}

json metrics_json(const Metrics& m) {
  json j = {{"mse", m.mse}};
  j["r2"] = m.r2 ? json(*m.r2) : json(nullptr);
  return j;
}

int run_fit(const FitArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const CsvTable table = read_csv(a.data);
  Dataset all = dataset_from_table(table, a.outcome);
  all.validate();

  FitConfig cfg;
  cfg.basis = basis_kind_from_string(a.basis);
  if (a.estimator == "lasso" || a.estimator == "penalized") {
    cfg.estimator = Estimator::Penalized;
  } else if (a.estimator == "ols") {
    cfg.estimator = Estimator::Ols;
  } else {
    throw DomainError("unknown estimator: " + a.estimator);
  }
  cfg.d_prime = a.dprime;
  cfg.J = a.J;
  cfg.lambda = a.lambda;
  cfg.penalize_intercept = !a.no_intercept_penalty;
  cfg.tol = a.tol;
  cfg.max_sweeps = a.max_sweeps;
  if (a.cv_folds > 0) {
    CvConfig cv;
    cv.folds = a.cv_folds;
    cv.n_lambda = a.cv_lambdas;
    cv.j_grid = a.j_grid;
    cv.seed = a.seed;
    cfg.cv = cv;
  }

  Dataset train = all;
  Dataset hold;
  if (a.holdout > 0.0) {
    auto [tr, te] = split_rows(static_cast<std::size_t>(all.n()), a.holdout, a.seed);
    train = all.subset(tr);
    hold = all.subset(te);
  }

  const SieveModel model = fit_sieve(train, cfg);
  const Eigen::VectorXd fitted = predict(model, train.features);
  const Metrics train_m = evaluate(fitted, train.outcome);

  json report;
  report["config"] = {{"command", "fit"},
                      {"data", a.data},
                      {"outcome", a.outcome},
                      {"basis", a.basis},
                      {"estimator", cfg.estimator == Estimator::Ols ? "ols" : "lasso"},
                      {"dprime", std::min(a.dprime, static_cast<int>(all.d()))},
                      {"J", model.beta().size()},
                      {"lambda", model.meta().lambda},
                      {"cv_folds", a.cv_folds},
                      {"holdout", a.holdout},
                      {"seed", a.seed},
                      {"penalize_intercept", cfg.penalize_intercept},
                      {"threads", max_threads()},
                      {"simd", std::string(simd::isa_name(simd::active().isa))}};
  report["n_train"] = train.n();
  report["train_mse"] = train_m.mse;
  report["converged"] = model.meta().converged;
  if (a.holdout > 0.0 && hold.n() > 0) report["holdout"] = metrics_json(evaluate(model, hold));

  if (!model.meta().converged && !a.allow_nonconverged) {
    err << "error: solver did not converge (use --allow-nonconverged to keep the model)\n";
    return kExitNotConverged;
  }
  if (!a.out.empty()) {
    save_model(model, a.out);
    report["model"] = a.out;
  }

  if (c.json_out) {
    out << report.dump(1) << '\n';
  } else {
    out << "config: " << report["config"].dump() << '\n';
    out << "resolved J: " << model.beta().size() << '\n';
    out << "resolved lambda: " << format_double(model.meta().lambda) << '\n';
    out << "train_mse: " << format_double(train_m.mse) << '\n';
    if (report.contains("holdout")) {
      out << "holdout_mse: " << format_double(report["holdout"]["mse"].get<double>()) << '\n';
      if (!report["holdout"]["r2"].is_null()) {
        out << "holdout_r2: " << format_double(report["holdout"]["r2"].get<double>()) << '\n';
      }
    }
    out << "converged: " << (model.meta().converged ? "true" : "false") << '\n';
    if (!a.out.empty()) out << "model: " << a.out << '\n';
  }
  return kExitOk;
}

int run_predict(const PredictArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const SieveModel model = load_model(a.model);
  const CsvTable table = read_csv(a.data);
  if (!a.outcome.empty() &&
      std::find(table.header.begin(), table.header.end(), a.outcome) == table.header.end()) {
    throw InputError("outcome column '" + a.outcome + "' not found in CSV header");
  }
  const Eigen::MatrixXd x = features_from_table(table, a.outcome);
  echo_config(err, {{"command", "predict"}, {"model", a.model}, {"data", a.data}, {"d", model.d()},
                    {"J", model.beta().size()}});
  const Eigen::VectorXd pred = predict(model, x);
  std::ostringstream csv;
  csv << "prediction\n";
  for (Eigen::Index i = 0; i < pred.size(); ++i) csv << format_double(pred(i)) << '\n';
  Common no_ts = c;
  no_ts.no_timestamp = true;
  emit(no_ts, csv.str(), out);
  return kExitOk;
}

int run_index(const IndexArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  const int dprime = a.dprime == 0 ? a.d : a.dprime;
  if ((a.max_prod == 0) == (a.J == 0)) throw DomainError("give exactly one of --max-prod or --J");
  const IndexMatrix index = a.max_prod > 0 ? generate_index_matrix(a.d, dprime, a.max_prod)
                                           : index_matrix_for_count(a.d, dprime, a.J);
  echo_config(err, {{"command", "index"}, {"d", a.d}, {"dprime", dprime}, {"max_prod", a.max_prod},
                    {"J", a.J}, {"rows", index.rows()}});
  std::ostringstream csv;
  for (int k = 0; k < a.d; ++k) csv << "dim" << (k + 1) << ',';
  csv << "c\n";
  for (std::size_t r = 0; r < index.rows(); ++r) {
    for (std::uint32_t v : index.row(r)) csv << v << ',';
    csv << index.c(r) << '\n';
  }
  emit(c, csv.str(), out);
  return kExitOk;
}

BenchConfig bench_config(const SimArgs& a) {
  BenchConfig cfg;
  cfg.methods = parse_methods(a.methods);
  cfg.basis = basis_kind_from_string(a.basis);
  cfg.d_prime = a.dprime;
  cfg.cv_folds = a.cv_folds;
  cfg.n_lambda = a.n_lambda;
  return cfg;
}

json sim_config_json(const std::string& command, const SimArgs& a) {
  return {{"command", command}, {"truth", a.truth}, {"d", a.d}, {"D", a.D}, {"n", a.n},
          {"n_test", a.n_test}, {"snr", a.snr}, {"seed", a.seed}, {"replicates", a.replicates},
          {"methods", a.methods}, {"basis", a.basis}, {"dprime", a.dprime}, {"cv_folds", a.cv_folds},
          {"n_lambda", a.n_lambda}, {"threads", max_threads()}};
}

int run_simulate(const std::string& command, const SimArgs& a, const Common& c, std::ostream& out,
                 std::ostream& err) {
  SimulationSpec spec;
  spec.truth = truth_from_string(a.truth);
  spec.d = a.d;
  spec.D = a.D;
  spec.n_train = a.n;
  spec.n_test = a.n_test;
  spec.snr = a.snr;
  spec.seed = a.seed;
  spec.validate();
  const BenchConfig cfg = bench_config(a);
  echo_config(err, sim_config_json(command, a));
  const auto rows = run_simulation(spec, a.replicates, cfg);
  if (c.json_out) {
    json arr = json::array();
    for (const auto& r : rows) {
      json j = metrics_json(r.metrics);
      j["method"] = r.method;
      j["seed"] = r.spec.seed;
      arr.push_back(j);
    }
    out << json{{"config", sim_config_json(command, a)}, {"rows", arr}}.dump(1) << '\n';
    return kExitOk;
  }
  std::ostringstream csv;
  write_simulation_csv(csv, rows);
  emit(c, csv.str(), out);
  return kExitOk;
}

int run_bench_data(const SimArgs& a, const Common& c, std::ostream& out, std::ostream& err) {
  Dataset all = dataset_from_table(read_csv(a.data), a.outcome);
  all.validate();
  auto [tr, te] = split_rows(static_cast<std::size_t>(all.n()), a.holdout, a.seed);
  if (te.empty()) throw DomainError("bench on data needs a non-empty holdout");
  Dataset train = all.subset(tr);
  Dataset test = all.subset(te);
  // Shared [0,1] scaling so the kernel baselines see the same inputs.
  const Normalizer norm = Normalizer::fit(train.features, train.feature_names);
  train.features = norm.apply(train.features);
  test.features = norm.apply(test.features);

  const BenchConfig cfg = bench_config(a);
  json conf = {{"command", "bench"}, {"data", a.data}, {"outcome", a.outcome}, {"holdout", a.holdout},
               {"seed", a.seed}, {"methods", a.methods}, {"basis", a.basis}, {"dprime", a.dprime},
               {"cv_folds", a.cv_folds}, {"threads", max_threads()}};
  echo_config(err, conf);
  std::ostringstream csv;
  csv << "method,n,mse,r2\n";
  json arr = json::array();
  for (Method m : cfg.methods) {
    if (m == Method::KrrOracle) throw DomainError("krr-oracle needs a simulation (active dimensions unknown)");
    const Metrics met = run_method(m, train, test, cfg);
    csv << to_string(m) << ',' << train.n() << ',' << format_double(met.mse) << ',';
    if (met.r2) csv << format_double(*met.r2);
    csv << '\n';
    json j = metrics_json(met);
    j["method"] = std::string(to_string(m));
    arr.push_back(j);
  }
  if (c.json_out) {
    out << json{{"config", conf}, {"rows", arr}}.dump(1) << '\n';
  } else {
    emit(c, csv.str(), out);
  }
  return kExitOk;
}

void add_common(CLI::App* sub, Common& c, bool csv_output) {
  sub->add_option("--threads", c.threads, "Worker thread cap (falls back to SIEVE_THREADS)");
  sub->add_flag("--json", c.json_out, "Machine-readable JSON output");
  if (csv_output) {
    sub->add_flag("--no-timestamp", c.no_timestamp, "Omit the '# generated' header line");
    sub->add_option("--out", c.out_path, "Write CSV to this file instead of stdout");
  }
}

void add_sim_options(CLI::App* sub, SimArgs& a, const std::string& default_methods) {
  a.methods = default_methods;
  sub->add_option("--truth", a.truth, "poly | cos | interaction")->check(CLI::IsMember({"poly", "cos", "interaction"}));
  sub->add_option("--d", a.d, "Ambient dimension");
  sub->add_option("--D", a.D, "Active dimension");
  sub->add_option("--n", a.n, "Training sample size");
  sub->add_option("--n-test", a.n_test, "Test sample size");
  sub->add_option("--snr", a.snr, "Signal-to-noise ratio");
  sub->add_option("--seed", a.seed, "Base seed");
  sub->add_option("--replicates", a.replicates, "Datasets per setting (seeds seed..seed+R-1)");
  sub->add_option("--methods", a.methods, "Comma list of sieve-ols,sieve-lasso,sieve-additive,krr,krr-oracle");
  sub->add_option("--basis", a.basis, "cosine | sine | legendre");
  sub->add_option("--dprime", a.dprime, "Interaction order for sieve-ols / sieve-lasso");
  sub->add_option("--cv-folds", a.cv_folds, "Cross-validation folds");
  sub->add_option("--n-lambda", a.n_lambda, "Lambda path length");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Penalized sieve regression in tensor product spaces", "sieve"};
  app.require_subcommand(1);

  Common common;
  FitArgs fit;
  PredictArgs pred;
  IndexArgs idx;
  SimArgs sim, bench;

  auto* fit_cmd = app.add_subcommand("fit", "Fit a sieve model from a CSV file");
  fit_cmd->add_option("--data", fit.data, "Training CSV (header row required)")->required();
  fit_cmd->add_option("--outcome", fit.outcome, "Outcome column name")->required();
  fit_cmd->add_option("--basis", fit.basis, "cosine | sine | legendre");
  fit_cmd->add_option("--estimator", fit.estimator, "lasso | ols");
  fit_cmd->add_option("--dprime", fit.dprime, "Working interaction order D'");
  fit_cmd->add_option("--J", fit.J, "Basis count (0 = default rule)");
  fit_cmd->add_option("--lambda", fit.lambda, "Penalty (0 = sqrt(ln J / n))");
  fit_cmd->add_option("--cv-folds", fit.cv_folds, "Cross-validate J and lambda with k folds (0 = off)");
  fit_cmd->add_option("--cv-lambdas", fit.cv_lambdas, "Lambda path length for CV");
  fit_cmd->add_option("--J-grid", fit.j_grid, "Basis counts to cross-validate")->delimiter(',');
  fit_cmd->add_option("--seed", fit.seed, "Seed for CV folds and holdout split");
  fit_cmd->add_option("--holdout", fit.holdout, "Fraction held out for reporting MSE / R^2");
  fit_cmd->add_option("--out", fit.out, "Model JSON output path");
  fit_cmd->add_option("--tol", fit.tol, "Coordinate-descent tolerance");
  fit_cmd->add_option("--max-sweeps", fit.max_sweeps, "Coordinate-descent sweep cap");
  fit_cmd->add_flag("--allow-nonconverged", fit.allow_nonconverged, "Exit 0 even if the solver did not converge");
  fit_cmd->add_flag("--no-intercept-penalty", fit.no_intercept_penalty, "Leave the constant basis function unpenalized");
  add_common(fit_cmd, common, false);

  auto* pred_cmd = app.add_subcommand("predict", "Predict with a saved model");
  pred_cmd->add_option("--model", pred.model, "Model JSON")->required();
  pred_cmd->add_option("--data", pred.data, "Feature CSV")->required();
  pred_cmd->add_option("--outcome", pred.outcome, "Column to ignore if present");
  add_common(pred_cmd, common, true);

  auto* index_cmd = app.add_subcommand("index", "Dump the ordered product-basis index matrix");
  index_cmd->add_option("--d", idx.d, "Dimension")->required();
  index_cmd->add_option("--dprime", idx.dprime, "Working interaction order (default d)");
  index_cmd->add_option("--max-prod", idx.max_prod, "Largest row product");
  index_cmd->add_option("--J", idx.J, "Number of rows");
  add_common(index_cmd, common, true);

  auto* sim_cmd = app.add_subcommand("simulate", "Run the simulation study");
  add_sim_options(sim_cmd, sim, "sieve-lasso");
  add_common(sim_cmd, common, true);

  auto* bench_cmd = app.add_subcommand("bench", "Compare sieve estimators with kernel baselines");
  add_sim_options(bench_cmd, bench, "sieve-ols,sieve-lasso,sieve-additive,krr");
  bench_cmd->add_option("--data", bench.data, "Benchmark on this CSV instead of simulated data");
  bench_cmd->add_option("--outcome", bench.outcome, "Outcome column for --data");
  bench_cmd->add_option("--holdout", bench.holdout, "Test fraction for --data");
  add_common(bench_cmd, common, true);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }

  if (common.threads > 0) set_max_threads(common.threads);

  try {
    if (*fit_cmd) return run_fit(fit, common, out, err);
    if (*pred_cmd) return run_predict(pred, common, out, err);
    if (*index_cmd) return run_index(idx, common, out, err);
    if (*sim_cmd) return run_simulate("simulate", sim, common, out, err);
    if (*bench_cmd) {
      if (!bench.data.empty()) {
        if (bench.outcome.empty()) throw DomainError("bench --data needs --outcome");
        return run_bench_data(bench, common, out, err);
      }
      return run_simulate("bench", bench, common, out, err);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadInput;
  }
  return kExitBadInput;
}

}  // namespace sieve::cli
