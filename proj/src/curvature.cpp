#include "alocv/curvature.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "alocv/errors.hpp"

namespace alocv {

namespace {

Eigen::MatrixXd restricted_columns(const Eigen::MatrixXd& x, const std::vector<Index>& support) {
  Eigen::MatrixXd xs(x.rows(), static_cast<Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) xs.col(static_cast<Index>(c)) = x.col(support[c]);
  return xs;
}

}  // namespace

Eigen::MatrixXd penalty_curvature(const PenaltySpec& penalty, const FitResult& fit,
                                  const std::vector<Index>& support) {
  const Index s = static_cast<Index>(support.size());
  Eigen::MatrixXd h = penalty.n_nu() * Eigen::MatrixXd::Identity(s, s);
  if (penalty.family != PenaltyFamily::GroupLasso) return h;

  std::vector<Index> position(fit.b_hat.size(), -1);
  for (Index c = 0; c < s; ++c) position[support[c]] = c;
  for (Index k : fit.active_groups) {
    const auto& g = penalty.groups[k];
    double lam = penalty.group_weights[k];
    if (lam == 0.0) continue;
    Eigen::VectorXd bg(static_cast<Index>(g.size()));
    for (std::size_t j = 0; j < g.size(); ++j) bg[static_cast<Index>(j)] = fit.b_hat[g[j]];
    double norm = bg.norm();
    if (norm <= 0) throw SingularSystem("active group with zero norm");
    Eigen::MatrixXd block = (lam / norm) * (Eigen::MatrixXd::Identity(bg.size(), bg.size()) -
                                            (bg * bg.transpose()) / (norm * norm));
    for (std::size_t a = 0; a < g.size(); ++a)
      for (std::size_t c = 0; c < g.size(); ++c)
        h(position[g[a]], position[g[c]]) += block(static_cast<Index>(a), static_cast<Index>(c));
  }
  return h;
}

AHat a_hat(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
           const FitResult& fit) {
  (void)loss;
  if (!fit.certified) throw InvalidInput("a_hat requires a certified fit");
  const Index p = data.p();

  std::vector<Index> support;
  if (penalty.family == PenaltyFamily::Ridge) {
    support.resize(p);
    for (Index j = 0; j < p; ++j) support[j] = j;
  } else {
    support = fit.active_set;
  }

  AHat a;
  a.penalty_kind = penalty.family;
  a.support = support;
  a.matrix = Eigen::MatrixXd::Zero(p, p);
  if (support.empty()) return a;

  Eigen::MatrixXd xs = restricted_columns(data.x, support);
  Eigen::MatrixXd hess = xs.transpose() * fit.curvature_diag.asDiagonal() * xs +
                         penalty_curvature(penalty, fit, support);
  Eigen::LLT<Eigen::MatrixXd> llt(hess);
  if (llt.info() != Eigen::Success)
    throw SingularSystem("effective Hessian not positive definite");
  const Index s = static_cast<Index>(support.size());
  Eigen::MatrixXd inv = llt.solve(Eigen::MatrixXd::Identity(s, s));
  inv = 0.5 * (inv + inv.transpose());  // kill factorization roundoff asymmetry
  for (Index r = 0; r < s; ++r)
    for (Index c = 0; c < s; ++c) a.matrix(support[r], support[c]) = inv(r, c);
  return a;
}

HatMatrixResult hat_matrix(const Dataset& data, const LossSpec& loss,
                           const PenaltySpec& penalty, const FitResult& fit) {
  if (loss.family != LossFamily::Square)
    throw WrongLoss("hat matrix is defined for the square loss");
  AHat a = a_hat(data, loss, penalty, fit);
  HatMatrixResult h;
  if (a.support.empty()) {
    h.matrix = Eigen::MatrixXd::Zero(data.n(), data.n());
    h.trace = 0.0;
    return h;
  }
  Eigen::MatrixXd xs = restricted_columns(data.x, a.support);
  Eigen::MatrixXd as(static_cast<Index>(a.support.size()), static_cast<Index>(a.support.size()));
  for (std::size_t r = 0; r < a.support.size(); ++r)
    for (std::size_t c = 0; c < a.support.size(); ++c)
      as(static_cast<Index>(r), static_cast<Index>(c)) = a.matrix(a.support[r], a.support[c]);
  h.matrix = xs * as * xs.transpose();
  h.trace = h.matrix.trace();
  return h;
}

Eigen::VectorXd leverages(const Dataset& data, const AHat& a) {
  const Index n = data.n();
  Eigen::VectorXd lev = Eigen::VectorXd::Zero(n);
  if (a.support.empty()) return lev;
  Eigen::MatrixXd xs = restricted_columns(data.x, a.support);
  const Index s = static_cast<Index>(a.support.size());
  Eigen::MatrixXd as(s, s);
  for (Index r = 0; r < s; ++r)
    for (Index c = 0; c < s; ++c) as(r, c) = a.matrix(a.support[r], a.support[c]);
  Eigen::MatrixXd m = xs * as;  // n x s
  for (Index i = 0; i < n; ++i) lev[i] = m.row(i).dot(xs.row(i));
  return lev;
}

double newton_loo_prediction(const Dataset& data, const LossSpec& loss,
                             const PenaltySpec& penalty, const FitResult& fit,
                             const AHat& a, Index i) {
  (void)penalty;
  if (i < 0 || i >= data.n()) throw InvalidInput("observation index out of range");
  double lev = 0.0;
  if (!a.support.empty()) {
    Eigen::VectorXd xi = data.x.row(i);
    lev = xi.dot(a.matrix * xi);
  }
  double pred = fit.predictions[i];
  double denom = 1.0 - lev * fit.curvature_diag[i];
  if (denom <= 1e-12) throw DegenerateLeverage("leverage denominator <= 1e-12");
  return pred + loss.d1(data.y[i], pred) * lev / denom;
}

}  // namespace alocv
