#include "alocv/penalty.hpp"

#include <algorithm>
#include <cmath>

#include "alocv/errors.hpp"

namespace alocv {

namespace {

double effective_mu(double nu, const std::optional<double>& sigma_op_norm) {
  if (!sigma_op_norm) return nu;
  if (!(*sigma_op_norm > 0)) throw InvalidInput("sigma operator norm must be > 0");
  return nu / *sigma_op_norm;
}

}  // namespace

double PenaltySpec::value(const Eigen::VectorXd& b) const {
  double ridge = 0.5 * n_nu() * b.squaredNorm();
  switch (family) {
    case PenaltyFamily::Ridge:
      return ridge;
    case PenaltyFamily::ElasticNet:
      return lambda * b.lpNorm<1>() + ridge;
    case PenaltyFamily::GroupLasso: {
      double s = 0.0;
      for (std::size_t k = 0; k < groups.size(); ++k) {
        double norm2 = 0.0;
        for (Index j : groups[k]) norm2 += b[j] * b[j];
        s += group_weights[static_cast<Index>(k)] * std::sqrt(norm2);
      }
      return s + ridge;
    }
  }
  return ridge;
}

std::string PenaltySpec::name() const {
  switch (family) {
    case PenaltyFamily::Ridge:
      return "ridge:" + std::to_string(nu);
    case PenaltyFamily::ElasticNet:
      return "enet:" + std::to_string(lambda) + "," + std::to_string(nu);
    case PenaltyFamily::GroupLasso:
      return "group:" + std::to_string(groups.size()) + "groups," + std::to_string(nu);
  }
  return "?";
}

PenaltySpec ridge_penalty(double nu, Index n_scale, std::optional<double> sigma_op_norm) {
  PenaltySpec p;
  p.family = PenaltyFamily::Ridge;
  p.nu = nu;
  p.n_scale = n_scale;
  p.mu_eff = effective_mu(nu, sigma_op_norm);
  validate(p);
  return p;
}

PenaltySpec elastic_net_penalty(double lambda, double nu, Index n_scale,
                                std::optional<double> sigma_op_norm) {
  PenaltySpec p;
  p.family = PenaltyFamily::ElasticNet;
  p.lambda = lambda;
  p.nu = nu;
  p.n_scale = n_scale;
  p.mu_eff = effective_mu(nu, sigma_op_norm);
  validate(p);
  return p;
}

PenaltySpec group_lasso_penalty(std::vector<std::vector<Index>> groups,
                                Eigen::VectorXd group_weights, double nu, Index n_scale,
                                std::optional<double> sigma_op_norm) {
  PenaltySpec p;
  p.family = PenaltyFamily::GroupLasso;
  p.groups = std::move(groups);
  p.group_weights = std::move(group_weights);
  p.nu = nu;
  p.n_scale = n_scale;
  p.mu_eff = effective_mu(nu, sigma_op_norm);
  validate(p);
  return p;
}

void validate(const PenaltySpec& penalty, Index p) {
  if (!(penalty.nu > 0)) throw InvalidInput("penalty requires nu > 0");
  if (penalty.n_scale < 1) throw InvalidInput("penalty n_scale must be >= 1");
  if (!(penalty.mu_eff > 0)) throw InvalidInput("penalty mu_eff must be > 0");
  if (penalty.family == PenaltyFamily::ElasticNet && penalty.lambda < 0)
    throw InvalidInput("elastic-net lambda must be >= 0");
  if (penalty.family == PenaltyFamily::GroupLasso) {
    if (penalty.groups.empty()) throw InvalidInput("group lasso needs at least one group");
    if (penalty.group_weights.size() != static_cast<Index>(penalty.groups.size()))
      throw InvalidInput("group weights must match group count");
    if (penalty.group_weights.minCoeff() < 0)
      throw InvalidInput("group weights must be >= 0");
    Index max_index = -1;
    std::vector<Index> seen;
    for (const auto& g : penalty.groups) {
      if (g.empty()) throw InvalidInput("empty group");
      for (Index j : g) {
        if (j < 0) throw InvalidInput("negative group index");
        seen.push_back(j);
        max_index = std::max(max_index, j);
      }
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
      throw InvalidInput("groups overlap");
    Index extent = (p >= 0) ? p : max_index + 1;
    if (static_cast<Index>(seen.size()) != extent || max_index != extent - 1 || seen.front() != 0)
      throw InvalidInput("groups do not cover [p]");
  }
}

}  // namespace alocv
