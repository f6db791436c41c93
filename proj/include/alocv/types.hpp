#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace alocv {

using Index = Eigen::Index;

enum class ModelKind { None, LinearGaussian, RobustLinear, SingleIndex };

struct SeedInfo {
  std::uint64_t seed = 0;
  ModelKind kind = ModelKind::None;
};

/// Observations for one regression problem. Rows of x are the observations
/// x_i; y holds the responses (binary responses encoded {0,1} as reals).
/// Immutable by convention once built.
struct Dataset {
  Eigen::MatrixXd x;                      // n x p
  Eigen::VectorXd y;                      // n
  std::optional<Eigen::MatrixXd> sigma;   // known covariance of the rows
  std::optional<Eigen::VectorXd> truth;   // beta* (linear) or index w (single-index)
  SeedInfo seed_info;

  Index n() const { return x.rows(); }
  Index p() const { return x.cols(); }
};

/// Checks the structural invariants (finite entries, sigma symmetric positive
/// definite, single-index normalization). Throws InvalidInput on violation.
void validate(const Dataset& data);

/// Coefficients are "active" above this magnitude; exact zero supports do not
/// survive floating point, so the cutoff scales with the largest coefficient.
inline double activity_threshold(const Eigen::VectorXd& b) {
  return 1e-10 * std::max(1.0, b.lpNorm<Eigen::Infinity>());
}

/// Solution of one regularized fit together with its certificate.
struct FitResult {
  Eigen::VectorXd b_hat;
  Eigen::VectorXd predictions;        // x * b_hat on the fitted data
  Eigen::VectorXd curvature_diag;     // D_ii = second derivative of the loss at x_i^T b_hat
  std::vector<Index> active_set;      // indices with |b_j| above the activity threshold
  std::vector<Index> active_groups;   // group-lasso only: groups with active norm
  double kkt_residual = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool certified = false;
  std::vector<double> objective_trace;  // objective value per iteration, non-increasing
};

double largest_eigenvalue(const Eigen::MatrixXd& sym);

/// Symmetric PSD square root (eigendecomposition; intended for diagnostics,
/// not hot paths).
Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& sym);

}  // namespace alocv
