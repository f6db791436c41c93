#include "alocv/solver.hpp"

#include <cmath>

#include "alocv/errors.hpp"

namespace alocv {

namespace {

double smooth_value(const LossSpec& loss, const Eigen::VectorXd& y,
                    const Eigen::VectorXd& preds) {
  double f = 0.0;
  for (Index i = 0; i < preds.size(); ++i) f += loss.value(y[i], preds[i]);
  return f;
}

Eigen::VectorXd d1_vector(const LossSpec& loss, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& preds) {
  Eigen::VectorXd g(preds.size());
  for (Index i = 0; i < preds.size(); ++i) g[i] = loss.d1(y[i], preds[i]);
  return g;
}

struct SolveState {
  Eigen::VectorXd b;
  Eigen::VectorXd preds;
  double kkt = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool certified = false;
  std::vector<double> trace;
};

// Monotone FISTA with function-value restart. The momentum anchor z keeps the
// accelerated rate; x only moves when the composite objective improves.
SolveState solve_composite(const Eigen::MatrixXd& x_mat, const Eigen::VectorXd& y,
                           const LossSpec& loss, const PenaltySpec& penalty,
                           const SolverConfig& cfg, const Eigen::VectorXd& start) {
  const Index p = x_mat.cols();
  if (!(cfg.tol > 0) || cfg.max_iter < 1) throw InvalidInput("solver config: tol > 0, max_iter >= 1");

  double lips = cfg.smooth_lipschitz_hint;
  if (lips <= 0) {
    double op = op_norm_estimate(x_mat);
    lips = 1.02 * op * op * loss.d2_max();
  }
  double step = 1.0 / (lips + penalty.n_nu());

  SolveState st;
  st.b = start.size() == p ? start : Eigen::VectorXd::Zero(p);
  st.preds = x_mat * st.b;

  auto objective = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& preds) {
    return smooth_value(loss, y, preds) + penalty.value(b);
  };
  auto kkt_at = [&](const Eigen::VectorXd& b, const Eigen::VectorXd& preds) {
    Eigen::VectorXd s = -(x_mat.transpose() * d1_vector(loss, y, preds));
    return detail::subgradient_distance(penalty, b, s) / std::max(1.0, s.norm());
  };

  double fx_total = objective(st.b, st.preds);
  if (!std::isfinite(fx_total)) throw NonFiniteObjective("objective not finite at start");
  st.trace.push_back(fx_total);
  st.kkt = kkt_at(st.b, st.preds);
  if (st.kkt <= cfg.tol) {
    st.certified = true;
    return st;
  }

  Eigen::VectorXd x_prev = st.b;
  Eigen::VectorXd y_pt = st.b;
  Eigen::VectorXd y_preds = st.preds;
  double t_momentum = 1.0;

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    double fy = smooth_value(loss, y, y_preds);
    Eigen::VectorXd grad = x_mat.transpose() * d1_vector(loss, y, y_preds);

    Eigen::VectorXd z, z_preds;
    double fz_smooth = 0.0;
    for (;;) {
      z = prox(penalty, y_pt - step * grad, step);
      z_preds = x_mat * z;
      fz_smooth = smooth_value(loss, y, z_preds);
      Eigen::VectorXd dz = z - y_pt;
      double quad = fy + grad.dot(dz) + 0.5 * dz.squaredNorm() / step;
      if (fz_smooth <= quad + 1e-12 * (1.0 + std::abs(fy))) break;
      step *= 0.5;
      if (step < 1e-18) throw NonFiniteObjective("step size collapsed");
    }
    double fz_total = fz_smooth + penalty.value(z);
    if (!std::isfinite(fz_total)) throw NonFiniteObjective("objective not finite");

    x_prev = st.b;
    bool improved = fz_total <= fx_total;
    if (improved) {
      st.b = z;
      st.preds = z_preds;
      fx_total = fz_total;
    }
    st.trace.push_back(fx_total);
    st.iterations = iter;

    st.kkt = improved ? kkt_at(st.b, st.preds) : st.kkt;
    if (st.kkt <= cfg.tol) {
      st.certified = true;
      return st;
    }

    if (!cfg.accelerate) {
      y_pt = st.b;
      y_preds = st.preds;
      continue;
    }
    if (!improved) {
      // restart momentum and take a plain proximal step from the incumbent
      t_momentum = 1.0;
      y_pt = st.b;
      y_preds = st.preds;
      continue;
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_momentum * t_momentum));
    y_pt = st.b + ((t_momentum - 1.0) / t_next) * (st.b - x_prev);
    y_preds = x_mat * y_pt;
    t_momentum = t_next;
  }
  return st;  // max_iter exhausted, certified stays false
}

FitResult finish(const Eigen::MatrixXd& x_mat, const Eigen::VectorXd& y,
                 const LossSpec& loss, const PenaltySpec& penalty, SolveState&& st) {
  FitResult fr;
  fr.b_hat = std::move(st.b);
  fr.predictions = x_mat * fr.b_hat;
  fr.curvature_diag.resize(y.size());
  for (Index i = 0; i < y.size(); ++i) fr.curvature_diag[i] = loss.d2(y[i], fr.predictions[i]);
  fr.active_set = detail::active_set(penalty, fr.b_hat);
  fr.active_groups = detail::active_groups(penalty, fr.b_hat);
  fr.kkt_residual = st.kkt;
  fr.iterations = st.iterations;
  fr.certified = st.certified;
  fr.objective_trace = std::move(st.trace);
  return fr;
}

}  // namespace

double op_norm_estimate(const Eigen::MatrixXd& x) {
  const Index p = x.cols();
  if (x.rows() == 0 || p == 0) return 0.0;
  Eigen::VectorXd v = Eigen::VectorXd::Ones(p) / std::sqrt(static_cast<double>(p));
  double sq = 0.0;
  for (int it = 0; it < 200; ++it) {
    Eigen::VectorXd w = x.transpose() * (x * v);
    double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (it > 0 && std::abs(norm - sq) <= 1e-9 * norm) {
      sq = norm;
      break;
    }
    sq = norm;
  }
  return std::sqrt(sq);
}

Eigen::VectorXd prox(const PenaltySpec& penalty, const Eigen::VectorXd& v, double step) {
  if (!(step > 0)) throw InvalidInput("prox: step must be > 0");
  double shrink = 1.0 + step * penalty.n_nu();
  switch (penalty.family) {
    case PenaltyFamily::Ridge:
      return v / shrink;
    case PenaltyFamily::ElasticNet: {
      Eigen::VectorXd out(v.size());
      double t = step * penalty.lambda;
      for (Index j = 0; j < v.size(); ++j) out[j] = soft_threshold(v[j], t) / shrink;
      return out;
    }
    case PenaltyFamily::GroupLasso: {
      Eigen::VectorXd out = Eigen::VectorXd::Zero(v.size());
      for (std::size_t k = 0; k < penalty.groups.size(); ++k) {
        const auto& g = penalty.groups[k];
        double norm2 = 0.0;
        for (Index j : g) norm2 += v[j] * v[j];
        double norm = std::sqrt(norm2);
        double t = step * penalty.group_weights[static_cast<Index>(k)];
        if (norm > t) {
          double scale = (1.0 - t / norm) / shrink;
          for (Index j : g) out[j] = scale * v[j];
        }
      }
      return out;
    }
  }
  return v / shrink;
}

namespace detail {

double subgradient_distance(const PenaltySpec& penalty, const Eigen::VectorXd& b,
                            const Eigen::VectorXd& s) {
  double n_nu = penalty.n_nu();
  double thr = activity_threshold(b);
  switch (penalty.family) {
    case PenaltyFamily::Ridge:
      return (s - n_nu * b).norm();
    case PenaltyFamily::ElasticNet: {
      double sq = 0.0;
      for (Index j = 0; j < b.size(); ++j) {
        double r = s[j] - n_nu * b[j];
        double d = std::abs(b[j]) > thr
                       ? r - penalty.lambda * (b[j] > 0 ? 1.0 : -1.0)
                       : std::max(std::abs(r) - penalty.lambda, 0.0);
        sq += d * d;
      }
      return std::sqrt(sq);
    }
    case PenaltyFamily::GroupLasso: {
      double sq = 0.0;
      for (std::size_t k = 0; k < penalty.groups.size(); ++k) {
        const auto& g = penalty.groups[k];
        double lam = penalty.group_weights[static_cast<Index>(k)];
        double bnorm2 = 0.0;
        for (Index j : g) bnorm2 += b[j] * b[j];
        double bnorm = std::sqrt(bnorm2);
        if (bnorm > thr) {
          for (Index j : g) {
            double d = s[j] - n_nu * b[j] - lam * b[j] / bnorm;
            sq += d * d;
          }
        } else {
          double rnorm2 = 0.0;
          for (Index j : g) rnorm2 += s[j] * s[j];
          double d = std::max(std::sqrt(rnorm2) - lam, 0.0);
          sq += d * d;
        }
      }
      return std::sqrt(sq);
    }
  }
  return 0.0;
}

std::vector<Index> active_set(const PenaltySpec& penalty, const Eigen::VectorXd& b) {
  double thr = activity_threshold(b);
  std::vector<Index> out;
  if (penalty.family == PenaltyFamily::GroupLasso) {
    for (const auto& g : penalty.groups) {
      double norm2 = 0.0;
      for (Index j : g) norm2 += b[j] * b[j];
      if (std::sqrt(norm2) > thr)
        for (Index j : g) out.push_back(j);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  for (Index j = 0; j < b.size(); ++j)
    if (std::abs(b[j]) > thr) out.push_back(j);
  return out;
}

std::vector<Index> active_groups(const PenaltySpec& penalty, const Eigen::VectorXd& b) {
  std::vector<Index> out;
  if (penalty.family != PenaltyFamily::GroupLasso) return out;
  double thr = activity_threshold(b);
  for (std::size_t k = 0; k < penalty.groups.size(); ++k) {
    double norm2 = 0.0;
    for (Index j : penalty.groups[k]) norm2 += b[j] * b[j];
    if (std::sqrt(norm2) > thr) out.push_back(static_cast<Index>(k));
  }
  return out;
}

}  // namespace detail

double kkt_residual(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
                    const Eigen::VectorXd& b) {
  Eigen::VectorXd preds = data.x * b;
  Eigen::VectorXd s = -(data.x.transpose() * d1_vector(loss, data.y, preds));
  return detail::subgradient_distance(penalty, b, s) / std::max(1.0, s.norm());
}

FitResult fit(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
              const SolverConfig& cfg) {
  if (penalty.n_scale != data.n())
    throw InvalidInput("penalty n_scale must equal the sample size");
  validate(penalty, data.p());
  SolveState st = solve_composite(data.x, data.y, loss, penalty, cfg, Eigen::VectorXd());
  return finish(data.x, data.y, loss, penalty, std::move(st));
}

FitResult fit_leave_one_out(const Dataset& data, const LossSpec& loss,
                            const PenaltySpec& penalty, Index leave_out,
                            const FitResult& warm, const SolverConfig& cfg) {
  const Index n = data.n();
  if (leave_out < 0 || leave_out >= n) throw InvalidInput("leave_out index out of range");
  Eigen::MatrixXd x_red(n - 1, data.p());
  Eigen::VectorXd y_red(n - 1);
  Index r = 0;
  for (Index i = 0; i < n; ++i) {
    if (i == leave_out) continue;
    x_red.row(r) = data.x.row(i);
    y_red[r] = data.y[i];
    ++r;
  }
  SolveState st = solve_composite(x_red, y_red, loss, penalty, cfg, warm.b_hat);
  return finish(x_red, y_red, loss, penalty, std::move(st));
}

}  // namespace alocv
