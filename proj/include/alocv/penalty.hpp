#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "alocv/types.hpp"

namespace alocv {

enum class PenaltyFamily { Ridge, ElasticNet, GroupLasso };

/// Convex regularizer R(b). All families carry the ridge term n*nu |b|^2/2
/// with nu > 0, which makes the objective strongly convex and R minimized
/// at 0. mu_eff is the (n mu, Sigma) strong-convexity constant: nu divided
/// by |Sigma|_op when the covariance is known, nu otherwise.
struct PenaltySpec {
  PenaltyFamily family = PenaltyFamily::Ridge;
  double lambda = 0.0;  // elastic-net l1 weight
  double nu = 0.0;      // ridge strength (per-sample)
  Index n_scale = 0;    // sample size entering n*nu
  double mu_eff = 0.0;
  std::vector<std::vector<Index>> groups;  // group-lasso partition of [p]
  Eigen::VectorXd group_weights;           // lambda_k >= 0

  double n_nu() const { return static_cast<double>(n_scale) * nu; }
  double value(const Eigen::VectorXd& b) const;
  std::string name() const;
};

PenaltySpec ridge_penalty(double nu, Index n_scale,
                          std::optional<double> sigma_op_norm = {});
PenaltySpec elastic_net_penalty(double lambda, double nu, Index n_scale,
                                std::optional<double> sigma_op_norm = {});
PenaltySpec group_lasso_penalty(std::vector<std::vector<Index>> groups,
                                Eigen::VectorXd group_weights, double nu, Index n_scale,
                                std::optional<double> sigma_op_norm = {});

/// Validates family parameters; group-lasso groups must partition [p].
/// Throws InvalidInput on violation. p < 0 skips the partition extent check.
void validate(const PenaltySpec& penalty, Index p = -1);

inline double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace alocv
