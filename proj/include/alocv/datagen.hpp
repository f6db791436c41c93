#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "alocv/types.hpp"

namespace alocv {

enum class NoiseKind { Gaussian, StudentT, Cauchy };
enum class LinkKind { Logistic, Probit };
enum class CovarianceKind { Identity, Ar1, Custom };

/// Seeded data model with Gaussian rows x_i ~ N(0, Sigma).
///   LinearGaussian  y = x^T coef + N(0, noise_scale^2)
///   RobustLinear    y = x^T coef + eps, eps Gaussian / Student-t / Cauchy
///   SingleIndex     y = 1{ U <= link(x^T coef) }, U uniform, coef normalized
///                   so coef^T Sigma coef = 1
struct ModelSpec {
  ModelKind kind = ModelKind::LinearGaussian;
  Eigen::VectorXd coef;       // beta* or the index w
  double noise_scale = 1.0;   // Gaussian sd
  NoiseKind noise = NoiseKind::Gaussian;
  double student_df = 2.0;
  LinkKind link = LinkKind::Logistic;
  CovarianceKind covariance = CovarianceKind::Identity;
  double ar1_rho = 0.0;
  Eigen::MatrixXd covariance_custom;
  Index n = 0;
  Index p = 0;
  std::uint64_t seed = 0;

  Eigen::MatrixXd covariance_matrix() const;
};

/// Rescales w so that w^T Sigma w = 1 (single-index convention).
Eigen::VectorXd normalized_index(const Eigen::VectorXd& w, const Eigen::MatrixXd& sigma);

/// Draws the dataset for spec. Single pass, order deterministic: the design is
/// drawn row by row, then the responses. Same seed gives a bitwise-identical
/// dataset.
Dataset generate(const ModelSpec& spec);

/// k nonzero entries of magnitude amplitude at seeded positions with random signs.
Eigen::VectorXd sparse_coefficients(Index p, Index k, double amplitude, std::uint64_t seed);

}  // namespace alocv
