#include "alocv/risk.hpp"

#include <cmath>

#include "alocv/errors.hpp"
#include "alocv/parallel.hpp"
#include "alocv/rng.hpp"

namespace alocv {

AloResult alo_estimate(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
                       const FitResult& fit, const AHat& a, const TestFunction& g) {
  const Index n = data.n();
  Eigen::VectorXd lev = leverages(data, a);
  AloResult out;
  out.weights.resize(n);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    double denom = 1.0 - lev[i] * fit.curvature_diag[i];
    if (denom <= 1e-12) throw DegenerateLeverage("leverage denominator <= 1e-12");
    out.weights[i] = lev[i] / denom;
    double pred = fit.predictions[i] + loss.d1(data.y[i], fit.predictions[i]) * out.weights[i];
    acc += g(pred, data.y[i]);
  }
  (void)penalty;
  out.estimate = acc / static_cast<double>(n);
  return out;
}

LooResult loo_estimate(const Dataset& data, const LossSpec& loss, const PenaltySpec& penalty,
                       const SolverConfig& cfg, const TestFunction& g) {
  const Index n = data.n();
  FitResult full = fit(data, loss, penalty, cfg);
  if (!full.certified) throw Error("leave-one-out: full fit not certified");

  SolverConfig loo_cfg = cfg;
  if (loo_cfg.smooth_lipschitz_hint <= 0) {
    double op = op_norm_estimate(data.x);
    loo_cfg.smooth_lipschitz_hint = 1.02 * op * op * loss.d2_max();
  }

  LooResult out;
  out.predictions.resize(n);
  std::vector<std::string> failures(n);
  parallel_for_index(n, [&](long i) {
    FitResult fi = fit_leave_one_out(data, loss, penalty, i, full, loo_cfg);
    if (!fi.certified) {
      failures[i] = "not certified";
      return;
    }
    out.predictions[i] = data.x.row(i).dot(fi.b_hat);
  });
  for (Index i = 0; i < n; ++i)
    if (!failures[i].empty())
      throw Error("leave-one-out solve failed at index " + std::to_string(i) + ": " + failures[i]);

  double acc = 0.0;
  for (Index i = 0; i < n; ++i) acc += g(out.predictions[i], data.y[i]);
  out.estimate = acc / static_cast<double>(n);
  return out;
}

double mf_weight(const AHat& a, const Eigen::MatrixXd& sigma) {
  return (sigma * a.matrix).trace();
}

double df_ratio(const Dataset& data, const FitResult& fit, const AHat& a) {
  Eigen::VectorXd lev = leverages(data, a);
  double num = 0.0, denom = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    double d = fit.curvature_diag[i];
    num += lev[i] * d;
    denom += (1.0 - lev[i] * d) * d;
  }
  if (denom <= 1e-12) throw DegenerateDenominator("df ratio denominator <= 1e-12");
  return num / denom;
}

double mf_estimate(const Dataset& data, const LossSpec& loss, const FitResult& fit,
                   const TestFunction& g, double weight) {
  if (!std::isfinite(weight) || weight < 0)
    throw InvalidInput("mf_estimate weight must be finite and >= 0");
  double acc = 0.0;
  for (Index i = 0; i < data.n(); ++i) {
    double pred = fit.predictions[i] + weight * loss.d1(data.y[i], fit.predictions[i]);
    acc += g(pred, data.y[i]);
  }
  return acc / static_cast<double>(data.n());
}

RemDiagnostics rem_diagnostics(const Dataset& data, const FitResult& fit, const AHat& a,
                               const Eigen::MatrixXd& sigma) {
  const Index n = data.n();
  double tr = mf_weight(a, sigma);
  Eigen::VectorXd lev = leverages(data, a);
  RemDiagnostics out;
  out.rem.resize(n);
  out.rem_sumsq = 0.0;
  out.discrepancy_sq = 0.0;
  for (Index i = 0; i < n; ++i) {
    double d = fit.curvature_diag[i];
    out.rem[i] = lev[i] - tr * (1.0 - d * lev[i]);
    out.rem_sumsq += out.rem[i] * out.rem[i];
    double w = lev[i] / (1.0 - d * lev[i]);
    double dev = w - tr;
    out.discrepancy_sq += dev * dev;
  }
  out.discrepancy_sq /= static_cast<double>(n);
  return out;
}

McEstimate generalization_error_mc(const Eigen::VectorXd& b, const ModelSpec& model,
                                   const TestFunction& g, long n_mc, std::uint64_t seed) {
  if (n_mc < 100) throw InvalidInput("monte-carlo estimate needs n_mc >= 100");
  if (b.size() != model.p) throw InvalidInput("coefficient length must equal model p");

  // chunked draws with per-chunk substreams: chunk c uses stream id c, so the
  // estimate is reproducible and chunks could be drawn in any order
  const long chunk = 2000;
  double sum = 0.0, sumsq = 0.0;
  long done = 0;
  long chunk_id = 0;
  while (done < n_mc) {
    long m = std::min(chunk, n_mc - done);
    ModelSpec piece = model;
    piece.n = m;
    piece.seed = splitmix64_combine(seed, static_cast<std::uint64_t>(chunk_id));
    Dataset fresh = generate(piece);
    Eigen::VectorXd preds = fresh.x * b;
    for (Index i = 0; i < m; ++i) {
      double v = g(preds[i], fresh.y[i]);
      sum += v;
      sumsq += v * v;
    }
    done += m;
    ++chunk_id;
  }
  double mean = sum / static_cast<double>(n_mc);
  double var = std::max(0.0, sumsq / static_cast<double>(n_mc) - mean * mean);
  McEstimate out;
  out.estimate = mean;
  out.std_error = std::sqrt(var / static_cast<double>(n_mc));
  return out;
}

ConcentrationConstants concentration_constants(Index p, Index n, double mu, double delta,
                                               double h_inv_opnorm) {
  if (p < 1 || n < 1 || !(mu > 0) || !(delta > 0) || !(h_inv_opnorm > 0))
    throw InvalidInput("concentration_constants: all inputs must be > 0");
  double h = h_inv_opnorm;
  double sp = std::sqrt(static_cast<double>(p));
  ConcentrationConstants out;
  out.k = (4.0 * static_cast<double>(p) + 2.0 * sp) * std::pow(h, 1.5);
  out.k_prime = h * sp * std::max(1.0, std::sqrt(h) * sp);
  double sn = std::sqrt(static_cast<double>(n));
  out.k_ceiling = 4.0 / (delta * std::pow(mu, 1.5) * sn) +
                  2.0 / (std::sqrt(delta) * std::pow(mu, 1.5) * static_cast<double>(n));
  out.k_prime_ceiling = (1.0 / (std::sqrt(delta) * mu * sn)) *
                        std::max(1.0, 1.0 / (std::sqrt(delta) * std::sqrt(mu)));
  out.within_ceilings = out.k <= out.k_ceiling * (1 + 1e-12) &&
                        out.k_prime <= out.k_prime_ceiling * (1 + 1e-12);
  return out;
}

}  // namespace alocv
