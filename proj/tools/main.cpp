// Command-line front end: fit | risk | experiment | verify.
//
// Exit codes: 0 ok, 1 usage or input error, 2 fit not certified,
// 3 experiment failure rate above 10%.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"

#include "alocv/curvature.hpp"
#include "alocv/errors.hpp"
#include "alocv/experiments.hpp"
#include "alocv/io.hpp"
#include "alocv/risk.hpp"
#include "alocv/solver.hpp"
#include "alocv/verify.hpp"

namespace {

using namespace alocv;

struct FitArgs {
  std::string data_path;
  std::string loss = "square";
  std::string penalty = "ridge:0.5";
  std::string sigma_path;
  std::string out_path;
  double tol = 1e-9;
  int max_iter = 100000;
  std::uint64_t seed = 0;
  // risk-only options
  std::string g = "sq";
  bool with_loo = false;
};

void add_common_fit_options(CLI::App* cmd, FitArgs& args) {
  cmd->add_option("--data", args.data_path, "dataset CSV (header x_1..x_p,y)")->required();
  cmd->add_option("--loss", args.loss, "square | huber[:m] | logistic");
  cmd->add_option("--penalty", args.penalty,
                  "ridge:nu | enet:lambda,nu | group:K:lambda,nu (lambda may be 'auto')");
  cmd->add_option("--sigma", args.sigma_path, "known covariance CSV (p x p, no header)");
  cmd->add_option("--tol", args.tol, "KKT residual target");
  cmd->add_option("--max-iter", args.max_iter, "iteration cap");
  cmd->add_option("--seed", args.seed, "seed recorded with the run");
  cmd->add_option("--out", args.out_path, "output path (default: stdout JSON)");
}

struct LoadedProblem {
  Dataset data;
  LossSpec loss;
  PenaltySpec penalty;
  SolverConfig cfg;
};

LoadedProblem load_problem(const FitArgs& args) {
  LoadedProblem p{read_dataset_csv(args.data_path), parse_loss(args.loss), PenaltySpec{}, {}};
  if (!args.sigma_path.empty()) {
    Eigen::MatrixXd sigma = read_matrix_csv(args.sigma_path);
    p.data.sigma = sigma;
    validate(p.data);
  }
  std::optional<double> sig_op;
  if (p.data.sigma) sig_op = largest_eigenvalue(*p.data.sigma);
  p.penalty = parse_penalty(args.penalty, p.data.n(), p.data.p(), sig_op);
  p.cfg.tol = args.tol;
  p.cfg.max_iter = args.max_iter;
  p.data.seed_info.seed = args.seed;
  return p;
}

void emit(const nlohmann::json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << std::endl;
    return;
  }
  std::ofstream out(out_path);
  if (!out) throw InvalidInput("cannot open for writing: " + out_path);
  out << j.dump(2) << "\n";
}

int cmd_fit(const FitArgs& args) {
  LoadedProblem p = load_problem(args);
  FitResult fr = fit(p.data, p.loss, p.penalty, p.cfg);
  nlohmann::json j = fit_result_to_json(fr);
  j["seed"] = args.seed;
  emit(j, args.out_path);
  return fr.certified ? 0 : 2;
}

int cmd_risk(const FitArgs& args) {
  LoadedProblem p = load_problem(args);
  TestFunction g = parse_test_function(args.g);
  FitResult fr = fit(p.data, p.loss, p.penalty, p.cfg);
  if (!fr.certified) {
    nlohmann::json j = fit_result_to_json(fr);
    j["seed"] = args.seed;
    emit(j, args.out_path);
    return 2;
  }
  AHat a = a_hat(p.data, p.loss, p.penalty, fr);

  RiskReport report;
  AloResult alo = alo_estimate(p.data, p.loss, p.penalty, fr, a, g);
  report.alo = alo.estimate;
  report.weights_alo = alo.weights;
  try {
    double w_df = df_ratio(p.data, fr, a);
    report.weight_df_ratio = w_df;
    report.mf_df = mf_estimate(p.data, p.loss, fr, g, w_df);
  } catch (const DegenerateDenominator&) {
    // all-zero curvature; the df weight has no value here
  }
  if (p.loss.family == LossFamily::Square) {
    Eigen::VectorXd lev = leverages(p.data, a);
    double tr_h = lev.sum();
    double denom = static_cast<double>(p.data.n()) - tr_h;
    if (denom > 1e-12) {
      report.weight_hat_ratio = tr_h / denom;
      report.mf_hat = mf_estimate(p.data, p.loss, fr, g, *report.weight_hat_ratio);
    }
  }
  if (p.data.sigma) {
    double w_mf = mf_weight(a, *p.data.sigma);
    report.weight_mf = w_mf;
    report.mf_sigma = mf_estimate(p.data, p.loss, fr, g, w_mf);
    RemDiagnostics rd = rem_diagnostics(p.data, fr, a, *p.data.sigma);
    report.rem = rd.rem;
    report.rem_sumsq = rd.rem_sumsq;
    report.discrepancy_sq = rd.discrepancy_sq;
  }
  if (args.with_loo) {
    LooResult loo = loo_estimate(p.data, p.loss, p.penalty, p.cfg, g);
    report.loo = loo.estimate;
  }

  nlohmann::json j = risk_report_to_json(report);
  j["seed"] = args.seed;
  j["fit"] = fit_result_to_json(fr);
  emit(j, args.out_path);

  std::string weights_path = args.out_path.empty() ? std::string("weights.csv")
                                                   : args.out_path + ".weights.csv";
  Eigen::VectorXd lev = leverages(p.data, a);
  Eigen::VectorXd denom =
      Eigen::VectorXd::Ones(p.data.n()) - lev.cwiseProduct(fr.curvature_diag);
  write_weights_csv(alo.weights, lev, denom, weights_path);
  return 0;
}

int cmd_experiment(const std::string& config_path, ExperimentConfig cfg, bool have_id) {
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) throw InvalidInput("cannot open: " + config_path);
    nlohmann::json j = nlohmann::json::parse(in);
    ExperimentConfig from_file = config_from_json(j);
    if (have_id) from_file.id = cfg.id;
    if (cfg.out_dir != "out") from_file.out_dir = cfg.out_dir;
    cfg = from_file;
  }
  ExperimentOutcome out = run_experiment(cfg);
  std::cout << "wrote " << out.csv_path << " and " << out.summary_path << " ("
            << out.rows - out.failures << "/" << out.rows << " replicates ok)" << std::endl;
  return out.failure_threshold_exceeded() ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regularized M-estimation risk estimates: approximate and exact "
               "leave-one-out, mean-field corrections, experiment harness"};
  app.require_subcommand(1);

  FitArgs fit_args;
  CLI::App* fit_cmd = app.add_subcommand("fit", "solve one regularized problem, emit JSON");
  add_common_fit_options(fit_cmd, fit_args);

  FitArgs risk_args;
  CLI::App* risk_cmd =
      app.add_subcommand("risk", "fit plus risk report (JSON) and per-i weights CSV");
  add_common_fit_options(risk_cmd, risk_args);
  risk_cmd->add_option("--g", risk_args.g, "test function: sq | abs | dev | mis:t");
  risk_cmd->add_flag("--with-loo", risk_args.with_loo, "also run the n exact refits");

  ExperimentConfig exp_cfg;
  std::string exp_config_path;
  CLI::App* exp_cmd = app.add_subcommand("experiment", "run a seeded experiment grid");
  CLI::Option* id_opt = exp_cmd->add_option("--id", exp_cfg.id, "experiment id E1..E5");
  exp_cmd->add_option("--config", exp_config_path, "JSON config file");
  exp_cmd->add_option("--n", exp_cfg.n_grid, "sample size grid");
  exp_cmd->add_option("--aspect", exp_cfg.aspect, "aspect ratio p/n");
  exp_cmd->add_option("--delta", exp_cfg.delta, "admissible aspect band [delta,1/delta]");
  exp_cmd->add_option("--replicates", exp_cfg.replicates, "replicates per grid point");
  exp_cmd->add_option("--seed", exp_cfg.master_seed, "master seed");
  exp_cmd->add_option("--out", exp_cfg.out_dir, "output directory");
  exp_cmd->add_option("--tol", exp_cfg.tol, "solver tolerance");
  exp_cmd->add_option("--loss", exp_cfg.loss, "override loss");
  exp_cmd->add_option("--penalty", exp_cfg.penalty, "override penalty");
  exp_cmd->add_option("--model", exp_cfg.model, "override data model");
  exp_cmd->add_option("--covariance", exp_cfg.covariance, "override covariance");
  exp_cmd->add_option("--test-function", exp_cfg.test_function, "override test function");
  exp_cmd->add_option("--n-mc", exp_cfg.n_mc, "monte-carlo draws (E4)");

  std::vector<std::string> verify_only;
  std::string verify_dir = "acceptance_out";
  CLI::App* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria A1..A10");
  verify_cmd->add_option("--only", verify_only, "subset of criteria ids");
  verify_cmd->add_option("--out", verify_dir, "work directory for experiment outputs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (risk_cmd->parsed()) return cmd_risk(risk_args);
    if (exp_cmd->parsed()) {
      // defaults depend on the id, so rebuild before applying overrides
      ExperimentConfig base = default_config(exp_cfg.id);
      if (exp_cmd->count("--n") == 0) exp_cfg.n_grid = base.n_grid;
      return cmd_experiment(exp_config_path, exp_cfg, id_opt->count() > 0);
    }
    if (verify_cmd->parsed()) {
      int failures = alocv::verify::run_and_report(std::cout, verify_only, verify_dir);
      return failures == 0 ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }
  return 1;
}
