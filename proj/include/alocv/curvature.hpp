#pragma once

#include <Eigen/Dense>
#include <vector>

#include "alocv/loss.hpp"
#include "alocv/penalty.hpp"
#include "alocv/types.hpp"

namespace alocv {

/// Inverse effective Hessian of the fitted problem, materialized densely on
/// its support (all of [p] for ridge; the active set for elastic-net and
/// group-lasso, zero elsewhere).
struct AHat {
  Eigen::MatrixXd matrix;       // p x p, symmetric PSD
  std::vector<Index> support;
  PenaltyFamily penalty_kind = PenaltyFamily::Ridge;
};

struct HatMatrixResult {
  Eigen::MatrixXd matrix;  // n x n, X A X^T under square loss
  double trace = 0.0;
};

/// Curvature matrix of the fit:
///   ridge        A = (X^T D X + n nu I)^{-1}
///   elastic-net  restricted to the active set S, (X_S^T D X_S + n nu I)^{-1}
///   group-lasso  restricted, with the angular term
///                sum_k (lambda_k/|b_k|) (I - b_k b_k^T/|b_k|^2) per active group.
/// Requires a certified fit.
AHat a_hat(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
           const FitResult& fit);

/// Penalty block of the effective Hessian on the support (the n nu I term plus
/// the group-lasso angular part); its inverse norm drives the deterministic
/// operator-norm bounds.
Eigen::MatrixXd penalty_curvature(const PenaltySpec& penalty, const FitResult& fit,
                                  const std::vector<Index>& support);

/// Hat matrix H = X A X^T and its trace; square loss only (WrongLoss otherwise).
HatMatrixResult hat_matrix(const Dataset& data, const LossSpec& loss,
                           const PenaltySpec& penalty, const FitResult& fit);

/// Leverages x_i^T A x_i for all i, using the support restriction.
Eigen::VectorXd leverages(const Dataset& data, const AHat& a);

/// One-step-Newton proxy for the left-out prediction x_i^T b^i:
///   x_i^T b_hat + L'_{y_i}(x_i^T b_hat) * lev_i / (1 - lev_i D_ii).
/// Throws DegenerateLeverage when the denominator falls below 1e-12.
double newton_loo_prediction(const Dataset& data, const LossSpec& loss,
                             const PenaltySpec& penalty, const FitResult& fit,
                             const AHat& a, Index i);

}  // namespace alocv
