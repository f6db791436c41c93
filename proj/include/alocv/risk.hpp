#pragma once

#include <Eigen/Dense>
#include <optional>

#include "alocv/curvature.hpp"
#include "alocv/datagen.hpp"
#include "alocv/loss.hpp"
#include "alocv/penalty.hpp"
#include "alocv/solver.hpp"
#include "alocv/types.hpp"

namespace alocv {

/// Risk estimates for one fit, carrying every available correction weight so
/// the sources stay distinguishable. Sigma-dependent fields are absent when
/// the covariance is unknown; hat-ratio fields only exist under square loss.
struct RiskReport {
  double alo = std::numeric_limits<double>::quiet_NaN();
  std::optional<double> loo;
  std::optional<double> mf_sigma;            // plug-in with weight tr[Sigma A]
  std::optional<double> mf_df;               // plug-in with the df ratio
  std::optional<double> mf_hat;              // plug-in with tr H / (n - tr H)
  Eigen::VectorXd weights_alo;               // W_i
  std::optional<double> weight_mf;           // tr[Sigma A]
  std::optional<double> weight_df_ratio;
  std::optional<double> weight_hat_ratio;
  std::optional<double> discrepancy_sq;      // (1/n) sum (W_i - tr[Sigma A])^2
  std::optional<Eigen::VectorXd> rem;
  std::optional<double> rem_sumsq;
};

struct AloResult {
  double estimate;
  Eigen::VectorXd weights;  // W_i = lev_i / (1 - lev_i D_ii)
};

/// Newton-step leave-one-out estimate: (1/n) sum g(alo prediction_i, y_i).
AloResult alo_estimate(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
                       const FitResult& fit, const AHat& a, const TestFunction& g);

struct LooResult {
  double estimate;
  Eigen::VectorXd predictions;  // x_i^T b^i
};

/// Exact leave-one-out: solves the n reduced problems (warm-started from the
/// full fit, parallel over disjoint indices) and aggregates through g.
LooResult loo_estimate(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
                       const SolverConfig& cfg, const TestFunction& g);

/// Mean-field correction weight tr[Sigma A].
double mf_weight(const AHat& a, const Eigen::MatrixXd& sigma);

/// Sigma-free observable weight tr[X A X^T D] / tr[D - D X A X^T D].
/// Throws DegenerateDenominator when the denominator is <= 1e-12.
double df_ratio(const Dataset& data, const FitResult& fit, const AHat& a);

/// Plug-in estimate (1/n) sum g(x_i^T b_hat + weight * L'_i, y_i) for a caller
/// selected weight (tr[Sigma A], df ratio, or hat ratio).
double mf_estimate(const Dataset& data, const LossSpec& loss, const FitResult& fit,
                   const TestFunction& g, double weight);

struct RemDiagnostics {
  Eigen::VectorXd rem;       // lev_i - tr[A Sigma] (1 - D_ii lev_i)
  double rem_sumsq;
  double discrepancy_sq;     // (1/n) sum (W_i - tr[A Sigma])^2
};

RemDiagnostics rem_diagnostics(const Dataset& data, const FitResult& fit, const AHat& a,
                               const Eigen::MatrixXd& sigma);

struct McEstimate {
  double estimate;
  double std_error;
};

/// Monte-Carlo generalization error of the coefficient vector b under the
/// model: fresh draws in seeded chunks, mean of g(b^T x, y) and its standard
/// error. n_mc >= 100.
McEstimate generalization_error_mc(const Eigen::VectorXd& b, const ModelSpec& model,
                                   const TestFunction& g, long n_mc, std::uint64_t seed);

/// Lipschitz constants of the leverage/trace functionals for inverse-Hessian
/// operator norm h: K = 4 p h^{3/2} + 2 sqrt(p) h^{3/2} and
/// K' = h sqrt(p) max(1, h^{1/2} sqrt(p)), plus the closed-form ceilings that
/// apply when h = 1/(n mu) and p/n lies in [delta, 1/delta].
struct ConcentrationConstants {
  double k;
  double k_prime;
  double k_ceiling;        // 4/(delta mu^{3/2} sqrt n) + 2/(sqrt(delta) mu^{3/2} n)
  double k_prime_ceiling;  // delta^{-1/2}/(mu sqrt n) max(1, delta^{-1/2}/sqrt(mu))
  bool within_ceilings;
};

ConcentrationConstants concentration_constants(Index p, Index n, double mu, double delta,
                                               double h_inv_opnorm);

}  // namespace alocv
