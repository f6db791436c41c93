#include "alocv/datagen.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "alocv/errors.hpp"
#include "alocv/rng.hpp"

namespace alocv {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double logistic_cdf(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Eigen::MatrixXd ModelSpec::covariance_matrix() const {
  switch (covariance) {
    case CovarianceKind::Identity:
      return Eigen::MatrixXd::Identity(p, p);
    case CovarianceKind::Ar1: {
      if (!(std::abs(ar1_rho) < 1)) throw InvalidInput("ar1 correlation must satisfy |rho| < 1");
      Eigen::MatrixXd s(p, p);
      for (Index i = 0; i < p; ++i)
        for (Index j = 0; j < p; ++j) s(i, j) = std::pow(ar1_rho, std::abs(double(i - j)));
      return s;
    }
    case CovarianceKind::Custom:
      if (covariance_custom.rows() != p || covariance_custom.cols() != p)
        throw InvalidInput("custom covariance must be p x p");
      return covariance_custom;
  }
  return Eigen::MatrixXd::Identity(p, p);
}

Eigen::VectorXd normalized_index(const Eigen::VectorXd& w, const Eigen::MatrixXd& sigma) {
  double q = w.dot(sigma * w);
  if (!(q > 0)) throw InvalidInput("index direction has zero Sigma-norm");
  return w / std::sqrt(q);
}

Dataset generate(const ModelSpec& spec) {
  if (spec.n < 1 || spec.p < 1) throw InvalidInput("model spec needs n, p >= 1");
  if (spec.coef.size() != spec.p) throw InvalidInput("coefficient length must equal p");
  if (spec.kind == ModelKind::LinearGaussian && spec.noise_scale < 0)
    throw InvalidInput("noise scale must be >= 0");
  if (spec.kind == ModelKind::RobustLinear && spec.noise == NoiseKind::StudentT &&
      !(spec.student_df > 0))
    throw InvalidInput("student-t df must be > 0");

  Eigen::MatrixXd sigma = spec.covariance_matrix();
  Eigen::LLT<Eigen::MatrixXd> llt(sigma);
  if (llt.info() != Eigen::Success) throw InvalidInput("covariance is not positive definite");
  Eigen::MatrixXd chol_t = llt.matrixL().transpose();  // X = Z * L^T gives rows ~ N(0, Sigma)

  Eigen::VectorXd coef = spec.coef;
  if (spec.kind == ModelKind::SingleIndex) {
    double q = coef.dot(sigma * coef);
    if (std::abs(q - 1.0) > 1e-8)
      throw InvalidInput("single-index coef must satisfy w^T Sigma w = 1 (see normalized_index)");
  }

  std::mt19937_64 rng = make_stream(spec.seed, 0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  Eigen::MatrixXd x(spec.n, spec.p);
  for (Index i = 0; i < spec.n; ++i)
    for (Index j = 0; j < spec.p; ++j) x(i, j) = gauss(rng);
  if (spec.covariance != CovarianceKind::Identity) x = x * chol_t;

  Eigen::VectorXd index_vals = x * coef;
  Eigen::VectorXd y(spec.n);
  switch (spec.kind) {
    case ModelKind::LinearGaussian: {
      for (Index i = 0; i < spec.n; ++i) y[i] = index_vals[i] + spec.noise_scale * gauss(rng);
      break;
    }
    case ModelKind::RobustLinear: {
      if (spec.noise == NoiseKind::Gaussian) {
        for (Index i = 0; i < spec.n; ++i) y[i] = index_vals[i] + spec.noise_scale * gauss(rng);
      } else if (spec.noise == NoiseKind::StudentT) {
        std::student_t_distribution<double> tdist(spec.student_df);
        for (Index i = 0; i < spec.n; ++i) y[i] = index_vals[i] + tdist(rng);
      } else {
        std::cauchy_distribution<double> cdist(0.0, 1.0);
        for (Index i = 0; i < spec.n; ++i) y[i] = index_vals[i] + cdist(rng);
      }
      break;
    }
    case ModelKind::SingleIndex: {
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      for (Index i = 0; i < spec.n; ++i) {
        double prob = spec.link == LinkKind::Logistic ? logistic_cdf(index_vals[i])
                                                      : normal_cdf(index_vals[i]);
        y[i] = unif(rng) <= prob ? 1.0 : 0.0;
      }
      break;
    }
    case ModelKind::None:
      throw InvalidInput("model kind not set");
  }

  Dataset data;
  data.x = std::move(x);
  data.y = std::move(y);
  data.sigma = std::move(sigma);
  data.truth = coef;
  data.seed_info = {spec.seed, spec.kind};
  validate(data);
  return data;
}

Eigen::VectorXd sparse_coefficients(Index p, Index k, double amplitude, std::uint64_t seed) {
  if (k < 0 || k > p) throw InvalidInput("sparse_coefficients needs 0 <= k <= p");
  Eigen::VectorXd out = Eigen::VectorXd::Zero(p);
  if (k == 0) return out;
  std::mt19937_64 rng = make_stream(seed, 1);
  std::vector<Index> idx(p);
  std::iota(idx.begin(), idx.end(), Index{0});
  std::shuffle(idx.begin(), idx.end(), rng);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (Index j = 0; j < k; ++j) out[idx[j]] = unif(rng) < 0.5 ? -amplitude : amplitude;
  return out;
}

}  // namespace alocv
