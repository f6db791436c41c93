#pragma once

#include <Eigen/Dense>
#include <optional>

#include "alocv/loss.hpp"
#include "alocv/penalty.hpp"
#include "alocv/types.hpp"

namespace alocv {

/// Accelerated proximal gradient configuration. The step is fixed from a
/// Lipschitz bound of the smooth part, halved whenever the descent inequality
/// fails; the stop rule is the normalized KKT residual.
struct SolverConfig {
  double tol = 1e-9;
  int max_iter = 100000;
  bool accelerate = true;
  double smooth_lipschitz_hint = 0.0;  // reuse a known |X|_op^2-based bound, 0 = estimate
};

/// argmin_b |b - v|^2 / (2 step) + R(b); closed form for all three families.
Eigen::VectorXd prox(const PenaltySpec& penalty, const Eigen::VectorXd& v, double step);

/// Normalized KKT residual at b: distance from s = -sum_i x_i L'_{y_i}(x_i^T b)
/// to the subdifferential of R at b, divided by max(1, |s|).
double kkt_residual(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
                    const Eigen::VectorXd& b);

/// Solves min_b sum_i L_{y_i}(x_i^T b) + R(b) to certified KKT accuracy.
/// On iteration exhaustion the best iterate is returned with certified=false.
FitResult fit(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
              const SolverConfig& cfg = {});

/// Same problem with observation i removed, warm-started at warm.b_hat.
/// The penalty (and its n_scale) is unchanged.
FitResult fit_leave_one_out(const Dataset& data, const LossSpec& loss,
                            const PenaltySpec& penalty, Index leave_out,
                            const FitResult& warm, const SolverConfig& cfg = {});

/// Largest singular value of x, estimated by power iteration on x^T x
/// (deterministic start, tolerance 1e-9). A 1.02 safety factor is applied by
/// the solver; underestimates are caught by backtracking.
double op_norm_estimate(const Eigen::MatrixXd& x);

namespace detail {
/// Distance from s to the subdifferential of R at b (unnormalized).
double subgradient_distance(const PenaltySpec& penalty, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& s);
/// Active coordinates / groups at the standard activity threshold.
std::vector<Index> active_set(const PenaltySpec& penalty, const Eigen::VectorXd& b);
std::vector<Index> active_groups(const PenaltySpec& penalty, const Eigen::VectorXd& b);
}  // namespace detail

}  // namespace alocv
