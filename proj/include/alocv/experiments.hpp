#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "alocv/datagen.hpp"
#include "alocv/loss.hpp"
#include "alocv/penalty.hpp"
#include "alocv/types.hpp"

namespace alocv {

/// Declarative experiment run: a grid of sample sizes at fixed aspect ratio,
/// seeded replicates, one CSV row per (n, replicate) plus a JSON summary with
/// per-n medians and log-log slopes.
///
/// Experiments
///   E1  square + elastic-net, linear model: hat-matrix diagonal concentration
///       max_i |H_ii - tr H / n| against sqrt(log n / n)
///   E2  huber + elastic-net, heavy-tailed linear model: (1/n) sum (W_i - tr[Sigma A])^2
///   E3  logistic + elastic-net, single-index model: same weight discrepancy
///   E4  huber + elastic-net: |ALO - LOO|, |MF - LOO| per weight source, |ALO - Err_mc|
///   E5  square + elastic-net: |tr[Sigma A] - tr H/(n - tr H)| sqrt(n)
struct ExperimentConfig {
  std::string id = "E1";
  std::vector<Index> n_grid = {400, 800, 1600};
  double aspect = 0.5;   // p / n
  double delta = 0.25;   // admissible band [delta, 1/delta] for p/n
  int replicates = 10;
  std::uint64_t master_seed = 20260809;
  std::string out_dir = "out";
  double tol = 1e-9;
  // empty string = per-experiment default
  std::string loss;           // square | huber[:m] | logistic
  std::string penalty;        // ridge:nu | enet:lambda,nu (lambda may be "auto") | group:K:lambda,nu
  std::string model;          // linear[:sd] | robust:t[:df] | robust:gauss[:sd] | robust:cauchy | single:logistic | single:probit
  std::string covariance;     // identity | ar1:rho
  std::string test_function;  // sq | abs | dev | mis:t
  long n_mc = 20000;          // E4 monte-carlo draws
};

ExperimentConfig default_config(const std::string& id);
void validate(const ExperimentConfig& cfg);

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

struct ExperimentOutcome {
  int rows = 0;
  int failures = 0;
  std::string csv_path;
  std::string summary_path;
  bool failure_threshold_exceeded() const { return failures * 10 > rows; }
};

/// Runs all replicates, writes <id>_results.csv and <id>_summary.json under
/// out_dir. Per-replicate failures are recorded in the CSV with a reason.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

// spec-string parsers shared with the command line
LossSpec parse_loss(const std::string& spec);
PenaltySpec parse_penalty(const std::string& spec, Index n_scale, Index p,
                          std::optional<double> sigma_op_norm);
TestFunction parse_test_function(const std::string& spec);

/// Default elastic-net level 0.1 sqrt(n log p): nontrivial sparsity without
/// emptying the support at desk scale.
double auto_lambda(Index n, Index p);

}  // namespace alocv
