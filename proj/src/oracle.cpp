#include "alocv/oracle.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <functional>
#include <random>

#include "alocv/errors.hpp"
#include "alocv/rng.hpp"

namespace alocv {

namespace {

FitResult probe_fit(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
                    const ProbeConfig& cfg) {
  SolverConfig scfg;
  scfg.tol = cfg.solver_tol;
  scfg.max_iter = cfg.max_iter;
  FitResult fr = fit(data, loss, penalty, scfg);
  if (!fr.certified) throw Error("probe refit did not certify");
  return fr;
}

bool same_support(const FitResult& a, const FitResult& b) {
  return a.active_set == b.active_set && a.active_groups == b.active_groups;
}

// 1d refinement grid for a convex objective: keep a window around the incumbent
// and shrink until the spacing reaches the requested resolution.
double refine_1d(const std::function<double(double)>& objective, double lo, double hi,
                 double resolution) {
  const int points = 257;
  double best = lo, best_val = objective(lo);
  for (;;) {
    double spacing = (hi - lo) / (points - 1);
    for (int k = 0; k < points; ++k) {
      double t = lo + spacing * k;
      double v = objective(t);
      if (v < best_val) {
        best_val = v;
        best = t;
      }
    }
    if (spacing <= resolution) return best;
    lo = best - 2 * spacing;
    hi = best + 2 * spacing;
  }
}

}  // namespace

Eigen::VectorXd jacobian_fd(const Dataset& data, const LossSpec& loss,
                            const PenaltySpec& penalty, const ProbeConfig& cfg, Index i,
                            Index j) {
  if (i < 0 || i >= data.n() || j < 0 || j >= data.p())
    throw InvalidInput("jacobian_fd: index out of range");
  double h = cfg.fd_step * std::max(1.0, std::abs(data.x(i, j)));

  Dataset plus = data;
  plus.x(i, j) += h;
  Dataset minus = data;
  minus.x(i, j) -= h;
  FitResult fp = probe_fit(plus, loss, penalty, cfg);
  FitResult fm = probe_fit(minus, loss, penalty, cfg);
  if (penalty.family != PenaltyFamily::Ridge && !same_support(fp, fm))
    throw SupportChanged("active set differs between the two design probes");
  return (fp.b_hat - fm.b_hat) / (2.0 * h);
}

Eigen::MatrixXd hat_matrix_fd(const Dataset& data, const PenaltySpec& penalty,
                              const ProbeConfig& cfg) {
  const Index n = data.n();
  LossSpec loss = square_loss();
  Eigen::MatrixXd h_fd(n, n);
  for (Index k = 0; k < n; ++k) {
    double h = cfg.fd_step * std::max(1.0, std::abs(data.y[k]));
    Dataset plus = data;
    plus.y[k] += h;
    Dataset minus = data;
    minus.y[k] -= h;
    FitResult fp = probe_fit(plus, loss, penalty, cfg);
    FitResult fm = probe_fit(minus, loss, penalty, cfg);
    if (penalty.family != PenaltyFamily::Ridge && !same_support(fp, fm))
      throw SupportChanged("active set differs between the two response probes");
    h_fd.col(k) = (data.x * fp.b_hat - data.x * fm.b_hat) / (2.0 * h);
  }
  return h_fd;
}

Eigen::VectorXd prox_bruteforce(const PenaltySpec& penalty, const Eigen::VectorXd& v,
                                double step, double grid_resolution) {
  if (!(step > 0) || !(grid_resolution > 0))
    throw InvalidInput("prox_bruteforce: step and resolution must be > 0");
  const Index p = v.size();
  auto objective = [&](const Eigen::VectorXd& b) {
    return (b - v).squaredNorm() / (2.0 * step) + penalty.value(b);
  };

  if (p <= 2 && penalty.family != PenaltyFamily::GroupLasso) {
    // small enough for a full grid over the box [-(|v|+1), |v|+1]^p
    double r = v.lpNorm<Eigen::Infinity>() + 1.0;
    const int points = 161;
    Eigen::VectorXd best = Eigen::VectorXd::Zero(p);
    double best_val = objective(best);
    double lo0 = -r, hi0 = r, lo1 = -r, hi1 = r;
    for (;;) {
      double s0 = (hi0 - lo0) / (points - 1);
      double s1 = p > 1 ? (hi1 - lo1) / (points - 1) : 0.0;
      Eigen::VectorXd b(p);
      for (int a = 0; a < points; ++a) {
        b[0] = lo0 + s0 * a;
        if (p == 1) {
          double val = objective(b);
          if (val < best_val) {
            best_val = val;
            best = b;
          }
          continue;
        }
        for (int c = 0; c < points; ++c) {
          b[1] = lo1 + s1 * c;
          double val = objective(b);
          if (val < best_val) {
            best_val = val;
            best = b;
          }
        }
      }
      if (s0 <= grid_resolution && (p == 1 || s1 <= grid_resolution)) return best;
      lo0 = best[0] - 2 * s0;
      hi0 = best[0] + 2 * s0;
      if (p > 1) {
        lo1 = best[1] - 2 * s1;
        hi1 = best[1] + 2 * s1;
      }
    }
  }

  Eigen::VectorXd out(p);
  switch (penalty.family) {
    case PenaltyFamily::Ridge:
    case PenaltyFamily::ElasticNet: {
      // separable: one refinement grid per coordinate
      double lam = penalty.family == PenaltyFamily::ElasticNet ? penalty.lambda : 0.0;
      for (Index j = 0; j < p; ++j) {
        double vj = v[j];
        auto obj1 = [&](double b) {
          return (b - vj) * (b - vj) / (2.0 * step) + lam * std::abs(b) +
                 0.5 * penalty.n_nu() * b * b;
        };
        double r = std::abs(vj) + 1.0;
        out[j] = refine_1d(obj1, -r, r, grid_resolution);
      }
      return out;
    }
    case PenaltyFamily::GroupLasso: {
      // the group subproblem is radial: minimize over the length along v_g
      out.setZero();
      for (std::size_t k = 0; k < penalty.groups.size(); ++k) {
        const auto& g = penalty.groups[k];
        double lam = penalty.group_weights[static_cast<Index>(k)];
        Eigen::VectorXd vg(static_cast<Index>(g.size()));
        for (std::size_t j = 0; j < g.size(); ++j) vg[static_cast<Index>(j)] = v[g[j]];
        double norm = vg.norm();
        if (norm == 0.0) continue;
        auto obj1 = [&](double t) {
          return (t - norm) * (t - norm) / (2.0 * step) + lam * std::abs(t) +
                 0.5 * penalty.n_nu() * t * t;
        };
        double t_best = refine_1d(obj1, 0.0, norm + 1.0, grid_resolution);
        for (std::size_t j = 0; j < g.size(); ++j) out[g[j]] = t_best * vg[static_cast<Index>(j)] / norm;
      }
      return out;
    }
  }
  return out;
}

double lipschitz_probe(MatrixFunctional fn, const Eigen::MatrixXd& x,
                       const Eigen::MatrixXd& h_pen, const Eigen::VectorXd& d_diag,
                       Index row, int n_probes, double eps, std::uint64_t seed) {
  const Index n = x.rows(), p = x.cols();
  if (h_pen.rows() != p || h_pen.cols() != p) throw InvalidInput("h_pen must be p x p");
  if (d_diag.size() != n) throw InvalidInput("d_diag must have length n");

  auto evaluate = [&](const Eigen::MatrixXd& xm) {
    Eigen::MatrixXd m = xm.transpose() * d_diag.asDiagonal() * xm + h_pen;
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw SingularSystem("probe Hessian not positive definite");
    if (fn == MatrixFunctional::TraceInverse)
      return llt.solve(Eigen::MatrixXd::Identity(p, p)).trace();
    Eigen::VectorXd xi = xm.row(row);
    return d_diag[row] * xi.dot(llt.solve(xi));
  };

  double base = evaluate(x);
  std::mt19937_64 rng = make_stream(seed, 7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < n_probes; ++t) {
    Eigen::MatrixXd delta(n, p);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < p; ++j) delta(i, j) = gauss(rng);
    delta /= delta.norm();  // Frobenius-unit direction
    double moved = evaluate(x + eps * delta);
    worst = std::max(worst, std::abs(moved - base) / eps);
  }
  return worst;
}

}  // namespace alocv
