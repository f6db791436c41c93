#include "alocv/types.hpp"

#include <Eigen/Eigenvalues>

#include "alocv/errors.hpp"

namespace alocv {

void validate(const Dataset& data) {
  if (data.n() < 1 || data.p() < 1) throw InvalidInput("dataset needs n >= 1 and p >= 1");
  if (!data.x.allFinite() || !data.y.allFinite())
    throw InvalidInput("dataset contains non-finite entries");
  if (data.y.size() != data.n()) throw InvalidInput("y length does not match rows of x");
  if (data.sigma) {
    const Eigen::MatrixXd& s = *data.sigma;
    if (s.rows() != data.p() || s.cols() != data.p())
      throw InvalidInput("sigma must be p x p");
    double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
      throw InvalidInput("sigma is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(s, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() <= 0.0)
      throw InvalidInput("sigma is not positive definite");
  }
  if (data.truth && data.seed_info.kind == ModelKind::SingleIndex) {
    Eigen::MatrixXd s =
        data.sigma ? *data.sigma : Eigen::MatrixXd(Eigen::MatrixXd::Identity(data.p(), data.p()));
    double q = data.truth->dot(s * (*data.truth));
    if (std::abs(q - 1.0) > 1e-8)
      throw InvalidInput("single-index truth is not normalized: w^T sigma w != 1");
  }
}

double largest_eigenvalue(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

Eigen::MatrixXd sqrt_spd(const Eigen::MatrixXd& sym) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sym);
  Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

}  // namespace alocv
