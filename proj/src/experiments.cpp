#include "alocv/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "alocv/curvature.hpp"
#include "alocv/errors.hpp"
#include "alocv/io.hpp"
#include "alocv/parallel.hpp"
#include "alocv/risk.hpp"
#include "alocv/rng.hpp"
#include "alocv/solver.hpp"

namespace alocv {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double to_double(const std::string& s, const std::string& what) {
  try {
    return std::stod(s);
  } catch (...) {
    throw InvalidInput("cannot parse " + what + ": '" + s + "'");
  }
}

}  // namespace

double auto_lambda(Index n, Index p) {
  return 0.1 * std::sqrt(static_cast<double>(n) * std::log(std::max<double>(2.0, double(p))));
}

LossSpec parse_loss(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.empty()) throw InvalidInput("empty loss spec");
  if (parts[0] == "square") return square_loss();
  if (parts[0] == "logistic") return logistic_loss();
  if (parts[0] == "huber")
    return huber_loss(parts.size() > 1 ? to_double(parts[1], "huber threshold") : 1.0);
  throw InvalidInput("unknown loss: " + spec);
}

PenaltySpec parse_penalty(const std::string& spec, Index n_scale, Index p,
                          std::optional<double> sigma_op_norm) {
  auto parts = split(spec, ':');
  if (parts.empty()) throw InvalidInput("empty penalty spec");
  if (parts[0] == "ridge") {
    if (parts.size() != 2) throw InvalidInput("ridge penalty: expected ridge:nu");
    return ridge_penalty(to_double(parts[1], "nu"), n_scale, sigma_op_norm);
  }
  if (parts[0] == "enet") {
    if (parts.size() != 2) throw InvalidInput("elastic net: expected enet:lambda,nu");
    auto args = split(parts[1], ',');
    if (args.size() != 2) throw InvalidInput("elastic net: expected enet:lambda,nu");
    double lambda = args[0] == "auto" ? auto_lambda(n_scale, p) : to_double(args[0], "lambda");
    return elastic_net_penalty(lambda, to_double(args[1], "nu"), n_scale, sigma_op_norm);
  }
  if (parts[0] == "group") {
    // group:K:lambda,nu -- K equal contiguous blocks over [p]
    if (parts.size() != 3) throw InvalidInput("group lasso: expected group:K:lambda,nu");
    long k = std::lround(to_double(parts[1], "group count"));
    auto args = split(parts[2], ',');
    if (args.size() != 2) throw InvalidInput("group lasso: expected group:K:lambda,nu");
    if (k < 1 || p % k != 0)
      throw InvalidInput("group lasso: p must be divisible by the group count");
    Index block = p / k;
    std::vector<std::vector<Index>> groups(k);
    for (long g = 0; g < k; ++g)
      for (Index j = 0; j < block; ++j) groups[g].push_back(g * block + j);
    double lambda = args[0] == "auto" ? auto_lambda(n_scale, p) / std::sqrt(double(k))
                                      : to_double(args[0], "lambda");
    Eigen::VectorXd weights = Eigen::VectorXd::Constant(k, lambda);
    return group_lasso_penalty(std::move(groups), std::move(weights),
                               to_double(args[1], "nu"), n_scale, sigma_op_norm);
  }
  throw InvalidInput("unknown penalty: " + spec);
}

TestFunction parse_test_function(const std::string& spec) {
  auto parts = split(spec, ':');
  if (parts.empty()) throw InvalidInput("empty test function spec");
  if (parts[0] == "sq") return squared_error();
  if (parts[0] == "abs") return absolute_error();
  if (parts[0] == "dev") return logistic_deviance();
  if (parts[0] == "mis")
    return misclassification(parts.size() > 1 ? to_double(parts[1], "threshold") : 0.5);
  throw InvalidInput("unknown test function: " + spec);
}

namespace {

struct ResolvedDefaults {
  std::string loss, penalty, model, covariance, test_function;
};

ResolvedDefaults experiment_defaults(const std::string& id) {
  if (id == "E1") return {"square", "enet:auto,0.5", "linear:1.0", "identity", "sq"};
  if (id == "E2") return {"huber:1.0", "enet:auto,0.5", "robust:t:2", "identity", "abs"};
  if (id == "E3") return {"logistic", "enet:auto,0.5", "single:logistic", "identity", "dev"};
  if (id == "E4") return {"huber:1.0", "enet:auto,0.5", "robust:t:2", "identity", "abs"};
  if (id == "E5") return {"square", "enet:auto,0.5", "linear:1.0", "ar1:0.5", "sq"};
  throw InvalidInput("unknown experiment id: " + id);
}

void apply_covariance(ModelSpec& spec, const std::string& cov) {
  auto parts = split(cov, ':');
  if (parts[0] == "identity") {
    spec.covariance = CovarianceKind::Identity;
    return;
  }
  if (parts[0] == "ar1") {
    if (parts.size() != 2) throw InvalidInput("covariance: expected ar1:rho");
    spec.covariance = CovarianceKind::Ar1;
    spec.ar1_rho = to_double(parts[1], "ar1 rho");
    return;
  }
  throw InvalidInput("unknown covariance: " + cov);
}

ModelSpec build_model(const std::string& model, const std::string& cov, Index n, Index p,
                      std::uint64_t seed) {
  ModelSpec spec;
  spec.n = n;
  spec.p = p;
  spec.seed = seed;
  apply_covariance(spec, cov);
  auto parts = split(model, ':');
  std::uint64_t coef_seed = splitmix64_combine(seed, 101);
  Index k = std::max<Index>(1, p / 10);
  if (parts[0] == "linear") {
    spec.kind = ModelKind::LinearGaussian;
    spec.noise_scale = parts.size() > 1 ? to_double(parts[1], "noise sd") : 1.0;
    spec.coef = sparse_coefficients(p, k, 2.0 / std::sqrt(double(k)), coef_seed);
    return spec;
  }
  if (parts[0] == "robust") {
    spec.kind = ModelKind::RobustLinear;
    spec.coef = sparse_coefficients(p, k, 2.0 / std::sqrt(double(k)), coef_seed);
    if (parts.size() < 2 || parts[1] == "t") {
      spec.noise = NoiseKind::StudentT;
      spec.student_df = parts.size() > 2 ? to_double(parts[2], "df") : 2.0;
    } else if (parts[1] == "gauss") {
      spec.noise = NoiseKind::Gaussian;
      spec.noise_scale = parts.size() > 2 ? to_double(parts[2], "noise sd") : 1.0;
    } else if (parts[1] == "cauchy") {
      spec.noise = NoiseKind::Cauchy;
    } else {
      throw InvalidInput("unknown robust noise: " + model);
    }
    return spec;
  }
  if (parts[0] == "single") {
    spec.kind = ModelKind::SingleIndex;
    spec.link = (parts.size() > 1 && parts[1] == "probit") ? LinkKind::Probit : LinkKind::Logistic;
    Eigen::VectorXd w = sparse_coefficients(p, k, 1.0, coef_seed);
    spec.coef = normalized_index(w, spec.covariance_matrix());
    return spec;
  }
  throw InvalidInput("unknown model: " + model);
}

struct Row {
  Index n = 0, p = 0;
  int replicate = 0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string reason;
  std::map<std::string, double> metrics;
};

std::vector<std::string> metric_columns(const std::string& id) {
  if (id == "E1") return {"max_dev", "ref_rate", "trace_h"};
  if (id == "E2" || id == "E3") return {"discrepancy_sq", "weight_mf", "rem_sumsq"};
  if (id == "E4")
    return {"alo",         "loo",         "mf_sigma",   "mf_df",
            "err_mc",      "err_mc_se",   "abs_alo_loo", "abs_mf_sigma_loo",
            "abs_mf_df_loo", "abs_alo_err_mc"};
  return {"hat_gap_sqrt_n", "weight_mf", "hat_ratio"};  // E5
}

Row run_replicate(const ExperimentConfig& cfg, const ResolvedDefaults& res, Index n,
                  int replicate, std::uint64_t row_index) {
  Row row;
  row.n = n;
  row.p = static_cast<Index>(std::lround(cfg.aspect * static_cast<double>(n)));
  row.replicate = replicate;
  row.seed = cfg.master_seed ^ row_index;  // replicate streams split by xor
  try {
    ModelSpec model = build_model(res.model, res.covariance, n, row.p, row.seed);
    Dataset data = generate(model);
    double sigma_op = largest_eigenvalue(*data.sigma);
    LossSpec loss = parse_loss(res.loss);
    PenaltySpec penalty = parse_penalty(res.penalty, n, row.p, sigma_op);
    TestFunction g = parse_test_function(res.test_function);
    SolverConfig scfg;
    scfg.tol = cfg.tol;

    FitResult fr = fit(data, loss, penalty, scfg);
    if (!fr.certified) throw Error("fit not certified");

    if (cfg.id == "E1") {
      AHat a = a_hat(data, loss, penalty, fr);
      Eigen::VectorXd lev = leverages(data, a);  // H_ii under square loss
      double tr_h = lev.sum();
      double avg = tr_h / static_cast<double>(n);
      row.metrics["max_dev"] = (lev.array() - avg).abs().maxCoeff();
      row.metrics["ref_rate"] = std::sqrt(std::log(double(n)) / double(n));
      row.metrics["trace_h"] = tr_h;
    } else if (cfg.id == "E2" || cfg.id == "E3") {
      AHat a = a_hat(data, loss, penalty, fr);
      RemDiagnostics rd = rem_diagnostics(data, fr, a, *data.sigma);
      row.metrics["discrepancy_sq"] = rd.discrepancy_sq;
      row.metrics["weight_mf"] = mf_weight(a, *data.sigma);
      row.metrics["rem_sumsq"] = rd.rem_sumsq;
    } else if (cfg.id == "E4") {
      AHat a = a_hat(data, loss, penalty, fr);
      AloResult alo = alo_estimate(data, loss, penalty, fr, a, g);
      LooResult loo = loo_estimate(data, loss, penalty, scfg, g);
      double w_sigma = mf_weight(a, *data.sigma);
      double w_df = df_ratio(data, fr, a);
      double mf_sigma = mf_estimate(data, loss, fr, g, w_sigma);
      double mf_df = mf_estimate(data, loss, fr, g, w_df);
      ModelSpec mc_model = model;
      McEstimate mc = generalization_error_mc(fr.b_hat, mc_model, g, cfg.n_mc,
                                              splitmix64_combine(row.seed, 202));
      row.metrics["alo"] = alo.estimate;
      row.metrics["loo"] = loo.estimate;
      row.metrics["mf_sigma"] = mf_sigma;
      row.metrics["mf_df"] = mf_df;
      row.metrics["err_mc"] = mc.estimate;
      row.metrics["err_mc_se"] = mc.std_error;
      row.metrics["abs_alo_loo"] = std::abs(alo.estimate - loo.estimate);
      row.metrics["abs_mf_sigma_loo"] = std::abs(mf_sigma - loo.estimate);
      row.metrics["abs_mf_df_loo"] = std::abs(mf_df - loo.estimate);
      row.metrics["abs_alo_err_mc"] = std::abs(alo.estimate - mc.estimate);
    } else {  // E5
      AHat a = a_hat(data, loss, penalty, fr);
      Eigen::VectorXd lev = leverages(data, a);
      double tr_h = lev.sum();
      double hat_ratio = tr_h / (static_cast<double>(n) - tr_h);
      double w_sigma = mf_weight(a, *data.sigma);
      row.metrics["hat_gap_sqrt_n"] =
          std::abs(w_sigma - hat_ratio) * std::sqrt(static_cast<double>(n));
      row.metrics["weight_mf"] = w_sigma;
      row.metrics["hat_ratio"] = hat_ratio;
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.ok = false;
    row.reason = e.what();
  }
  return row;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

ExperimentConfig default_config(const std::string& id) {
  ExperimentConfig cfg;
  cfg.id = id;
  experiment_defaults(id);  // validates the id
  if (id == "E4") cfg.n_grid = {400, 800};
  return cfg;
}

void validate(const ExperimentConfig& cfg) {
  experiment_defaults(cfg.id);
  if (cfg.n_grid.empty()) throw InvalidInput("experiment needs a non-empty n grid");
  if (cfg.replicates < 1) throw InvalidInput("experiment needs replicates >= 1");
  if (!(cfg.delta > 0) || cfg.delta >= 1) throw InvalidInput("delta must lie in (0,1)");
  if (cfg.aspect < cfg.delta || cfg.aspect > 1.0 / cfg.delta)
    throw InvalidInput("aspect ratio p/n outside [delta, 1/delta]");
  if (!(cfg.tol > 0)) throw InvalidInput("tol must be > 0");
  if (cfg.n_mc < 100) throw InvalidInput("n_mc must be >= 100");
  for (Index n : cfg.n_grid) {
    if (n < 2) throw InvalidInput("grid sample sizes must be >= 2");
    if (std::lround(cfg.aspect * double(n)) < 1)
      throw InvalidInput("aspect ratio gives p < 1 at n=" + std::to_string(n));
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg = default_config(j.value("experiment", std::string("E1")));
  if (j.contains("n_grid")) cfg.n_grid = j["n_grid"].get<std::vector<Index>>();
  cfg.aspect = j.value("aspect", cfg.aspect);
  cfg.delta = j.value("delta", cfg.delta);
  cfg.replicates = j.value("replicates", cfg.replicates);
  cfg.master_seed = j.value("seed", cfg.master_seed);
  cfg.out_dir = j.value("out_dir", cfg.out_dir);
  cfg.tol = j.value("tol", cfg.tol);
  cfg.loss = j.value("loss", cfg.loss);
  cfg.penalty = j.value("penalty", cfg.penalty);
  cfg.model = j.value("model", cfg.model);
  cfg.covariance = j.value("covariance", cfg.covariance);
  cfg.test_function = j.value("test_function", cfg.test_function);
  cfg.n_mc = j.value("n_mc", cfg.n_mc);
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  ResolvedDefaults res = experiment_defaults(cfg.id);
  nlohmann::json j;
  j["experiment"] = cfg.id;
  j["n_grid"] = cfg.n_grid;
  j["aspect"] = cfg.aspect;
  j["delta"] = cfg.delta;
  j["replicates"] = cfg.replicates;
  j["seed"] = cfg.master_seed;
  j["out_dir"] = cfg.out_dir;
  j["tol"] = cfg.tol;
  j["loss"] = cfg.loss.empty() ? res.loss : cfg.loss;
  j["penalty"] = cfg.penalty.empty() ? res.penalty : cfg.penalty;
  j["model"] = cfg.model.empty() ? res.model : cfg.model;
  j["covariance"] = cfg.covariance.empty() ? res.covariance : cfg.covariance;
  j["test_function"] = cfg.test_function.empty() ? res.test_function : cfg.test_function;
  j["n_mc"] = cfg.n_mc;
  return j;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  ResolvedDefaults res = experiment_defaults(cfg.id);
  if (!cfg.loss.empty()) res.loss = cfg.loss;
  if (!cfg.penalty.empty()) res.penalty = cfg.penalty;
  if (!cfg.model.empty()) res.model = cfg.model;
  if (!cfg.covariance.empty()) res.covariance = cfg.covariance;
  if (!cfg.test_function.empty()) res.test_function = cfg.test_function;

  const long total = static_cast<long>(cfg.n_grid.size()) * cfg.replicates;
  std::vector<Row> rows(total);
  parallel_for_index(total, [&](long idx) {
    Index n = cfg.n_grid[idx / cfg.replicates];
    int rep = static_cast<int>(idx % cfg.replicates);
    rows[idx] = run_replicate(cfg, res, n, rep, static_cast<std::uint64_t>(idx));
  });

  std::filesystem::create_directories(cfg.out_dir);
  ExperimentOutcome outcome;
  outcome.rows = static_cast<int>(total);
  outcome.csv_path = cfg.out_dir + "/" + cfg.id + "_results.csv";
  outcome.summary_path = cfg.out_dir + "/" + cfg.id + "_summary.json";

  std::vector<std::string> cols = metric_columns(cfg.id);
  {
    std::ofstream out(outcome.csv_path);
    if (!out) throw InvalidInput("cannot open for writing: " + outcome.csv_path);
    out << "experiment,n,p,replicate,seed,status,reason";
    for (const auto& c : cols) out << "," << c;
    out << "\n";
    for (const Row& row : rows) {
      out << cfg.id << "," << row.n << "," << row.p << "," << row.replicate << "," << row.seed
          << "," << (row.ok ? "ok" : "failed") << ",";
      std::string reason = row.reason;
      std::replace(reason.begin(), reason.end(), ',', ';');
      out << reason;
      for (const auto& c : cols) {
        out << ",";
        if (row.ok) out << format_double(row.metrics.at(c));
      }
      out << "\n";
      if (!row.ok) ++outcome.failures;
    }
  }

  nlohmann::json summary;
  summary["config"] = config_to_json(cfg);
  summary["rows"] = outcome.rows;
  summary["failures"] = outcome.failures;
  nlohmann::json per_n = nlohmann::json::object();
  for (Index n : cfg.n_grid) {
    nlohmann::json entry;
    for (const auto& c : cols) {
      std::vector<double> vals;
      for (const Row& row : rows)
        if (row.ok && row.n == n) vals.push_back(row.metrics.at(c));
      entry["median_" + c] = vals.empty() ? nlohmann::json() : nlohmann::json(median(vals));
    }
    per_n[std::to_string(n)] = entry;
  }
  summary["per_n"] = per_n;

  nlohmann::json slopes = nlohmann::json::object();
  for (const auto& c : cols) {
    // least-squares slope of log(metric) on log(n) across successful rows
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    long m = 0;
    for (const Row& row : rows) {
      if (!row.ok) continue;
      double v = row.metrics.at(c);
      if (!(v > 0)) continue;
      double lx = std::log(static_cast<double>(row.n)), ly = std::log(v);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++m;
    }
    double denom = m > 1 ? m * sxx - sx * sx : 0.0;
    slopes[c] = (std::abs(denom) > 1e-12) ? nlohmann::json((m * sxy - sx * sy) / denom)
                                          : nlohmann::json();
  }
  summary["slope"] = slopes;

  std::ofstream sout(outcome.summary_path);
  if (!sout) throw InvalidInput("cannot open for writing: " + outcome.summary_path);
  sout << summary.dump(2) << "\n";
  return outcome;
}

}  // namespace alocv
