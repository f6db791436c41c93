#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "alocv/loss.hpp"
#include "alocv/penalty.hpp"
#include "alocv/solver.hpp"
#include "alocv/types.hpp"

namespace alocv {

/// Independent brute-force / finite-difference checks. These never call the
/// curvature or risk modules; refit-based probes go through fit() only.
struct ProbeConfig {
  double fd_step = 1e-5;    // scaled by max(1, |entry|)
  double solver_tol = 1e-10;
  int max_iter = 200000;
  int n_probes = 100;
};

/// Central finite difference of b_hat with respect to the design entry (i, j),
/// computed from two full refits. For elastic-net / group-lasso the active set
/// must match between the two probes (SupportChanged otherwise).
Eigen::VectorXd jacobian_fd(const Dataset& data, const LossSpec& loss,
                            const PenaltySpec& penalty, const ProbeConfig& cfg, Index i,
                            Index j);

/// Finite-difference Jacobian of y -> X b_hat under square loss; column k uses
/// refits at y +- h e_k.
Eigen::MatrixXd hat_matrix_fd(const Dataset& data, const PenaltySpec& penalty,
                              const ProbeConfig& cfg);

/// Grid minimizer of |b - v|^2/(2 step) + R(b), refined until the spacing is
/// below grid_resolution. Full 2d grid for p <= 2; per-coordinate grids for
/// ridge / elastic-net and per-group radial grids for group-lasso otherwise.
Eigen::VectorXd prox_bruteforce(const PenaltySpec& penalty, const Eigen::VectorXd& v,
                                double step, double grid_resolution);

enum class MatrixFunctional {
  Leverage,      // f(X) = D_ii x_i^T (X^T D X + H)^{-1} x_i
  TraceInverse,  // F(X) = tr[(X^T D X + H)^{-1}]
};

/// Max of |fn(X + eps Delta) - fn(X)| / (eps |Delta|_F) over seeded random
/// Frobenius-unit directions; compare against the closed-form Lipschitz
/// constants of the functional.
double lipschitz_probe(MatrixFunctional fn, const Eigen::MatrixXd& x,
                       const Eigen::MatrixXd& h_pen, const Eigen::VectorXd& d_diag,
                       Index row, int n_probes, double eps, std::uint64_t seed);

}  // namespace alocv
