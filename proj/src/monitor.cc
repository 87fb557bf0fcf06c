#include "dualdec/monitor.h"

#include <algorithm>
#include <cmath>

#include "dualdec/errors.h"

namespace dualdec {

namespace {

double LeastSquaresSlope(const std::vector<double>& x,
                         const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return 0;
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0;
}

}  // namespace

BoundCheck CheckBestValueBound(const Trace& t, double m1, double r_squared,
                               double k_noise, double g) {
  Require(t.has_reference, "bound check needs Q* in the trace");
  BoundCheck b;
  b.applicable = true;
  b.m1 = m1;
  b.r_squared = r_squared;
  b.k_noise = k_noise;
  b.g = g;
  const int64_t iters = t.iterations();
  b.lhs.resize(iters + 1);
  b.rhs.resize(iters + 1);
  b.holds.resize(iters + 1);
  double best_q = -kInf, sum_alpha = 0, sum_sq = 0;
  for (int64_t k = 0; k <= iters; ++k) {
    best_q = std::max(best_q, t.q[k]);
    const double a = t.step_alpha[k];
    sum_alpha += a;
    if (k >= 1) sum_sq += a * a;
    b.lhs[k] = t.q_star - best_q;
    b.rhs[k] = (m1 * r_squared + (m1 * k_noise + g * g) * sum_sq) /
               (2 * sum_alpha);
    const double slack = (b.rhs[k] - b.lhs[k]) / std::max(1.0, std::abs(b.rhs[k]));
    b.min_relative_slack = std::min(b.min_relative_slack, slack);
    b.holds[k] = slack >= -1e-9;
    if (!b.holds[k] && b.first_violation < 0) b.first_violation = k;
  }
  return b;
}

MonitorReport Monitor(const Trace& t, const RunConfig& config) {
  MonitorReport r;
  const ProblemInstance& problem = *config.problem;
  const int64_t iters = t.iterations();
  const int m = t.num_edges;

  // Persistent activation: every edge keeps a positive update rate.
  if (m > 0) {
    r.delta_applicable = true;
    r.delta_hat = kInf;
    std::vector<int64_t> gamma(m, 0);
    std::vector<int64_t> late(m, 0);  // activations in (K/2, K]
    int64_t checkpoint = 1;
    for (int64_t k = 1; k <= iters; ++k) {
      const uint8_t* mask = t.mask(k);
      for (int e = 0; e < m; ++e) {
        gamma[e] += mask[e];
        if (2 * k > iters) late[e] += mask[e];
      }
      if (k == checkpoint) {
        if (4 * k >= iters) {
          for (int e = 0; e < m; ++e) {
            r.delta_hat = std::min(r.delta_hat, static_cast<double>(gamma[e]) / k);
          }
        }
        checkpoint *= 2;
      }
    }
    if (!std::isfinite(r.delta_hat)) {
      // No power of two in [K/4, K] only happens for K < 1; use the end.
      for (int e = 0; e < m; ++e) {
        r.delta_hat = std::min(r.delta_hat,
                               static_cast<double>(gamma[e]) / std::max<int64_t>(iters, 1));
      }
    }
    const bool starved =
        std::any_of(late.begin(), late.end(), [](int64_t c) { return c == 0; });
    if (r.delta_hat == 0 || starved) {
      r.violations.push_back(
          "Assumption 2 violated: an edge stops updating (delta_hat = " +
          FormatDouble(r.delta_hat) + ")");
    }
  }

  // Stepsize rules must be diminishing and square summable.
  for (const StepsizeRule& rule : config.stepsize) {
    if (!SatisfiesDiminishingConditions(rule)) {
      r.violations.push_back("Assumption 3 violated: stepsize rule " +
                             RuleName(rule) + " is not diminishing/square-summable");
      break;
    }
  }

  // Bounded supergradients.
  for (int64_t k = 0; k <= iters; ++k) {
    if (t.residual[k] > r.g_hat) {
      r.g_hat = t.residual[k];
      r.g_hat_step = k;
    }
  }
  if (r.g_hat_step < 0) r.g_hat_step = 0;

  // Linear growth of the supergradient.
  if (t.has_lambda_star) {
    double c = -1;
    for (int64_t k = 0; k <= iters; ++k) {
      const double v = t.residual[k] * t.residual[k] / (1 + t.dist[k] * t.dist[k]);
      if (v > c) {
        c = v;
        r.c_hat_step = k;
      }
    }
    r.c_hat = c;
  }

  if (!IsZeroMean(config.noise)) {
    r.notes.push_back("biased noise: only neighbourhood convergence expected");
  }

  if (t.has_reference) {
    // Weak duality sanity check on the reference.
    for (int64_t k = 0; k <= iters; ++k) {
      if (t.gap[k] < -1e-9 * (1 + std::abs(t.q_star))) {
        r.notes.push_back("negative gap at k = " + std::to_string(k) +
                          ": reference Q* is not an upper bound");
        break;
      }
    }
    r.rate_product.resize(iters + 1);
    r.rate_product_running_min.resize(iters + 1);
    double run_min = kInf;
    for (int64_t k = 0; k <= iters; ++k) {
      r.rate_product[k] = static_cast<double>(k) * t.step_alpha[k] * t.gap[k];
      run_min = std::min(run_min, r.rate_product[k]);
      r.rate_product_running_min[k] = run_min;
    }

    const auto probs = IidProbabilities(config.scheduler, m);
    if (!t.has_lambda_star) {
      r.best_value_bound.skipped_reason = "no analytic lambda* (R unknown)";
    } else if (!probs) {
      r.best_value_bound.skipped_reason = "scheduler is not i.i.d. in time (m1 undefined)";
    } else if (!IsZeroMean(config.noise)) {
      r.best_value_bound.skipped_reason = "biased noise";
    } else {
      double pmin = 1;
      for (double p : *probs) pmin = std::min(pmin, p);
      const double m1 = m > 0 ? 1 / pmin : 1;
      const Vector lambda0 =
          config.lambda0 ? *config.lambda0 : Vector::Zero(problem.dual_dim());
      const double r_sq =
          (lambda0 - *config.reference->lambda_star).squaredNorm();
      r.best_value_bound = CheckBestValueBound(
          t, m1, r_sq, SecondMomentBound(config.noise, problem.dual_dim()),
          r.g_hat);
    }
  } else {
    r.best_value_bound.skipped_reason = "no reference";
  }
  return r;
}

RateEstimate EstimateRate(std::span<const double> gap, double q) {
  Require(!gap.empty(), "rate estimate needs a gap series");
  RateEstimate est;
  const int64_t n = static_cast<int64_t>(gap.size());
  est.b.resize(n);
  est.scaled.resize(n);
  est.scaled_running_min.resize(n);
  double b = kInf, smin = kInf;
  std::vector<double> lx, llx, ly, lly;
  for (int64_t k = 0; k < n; ++k) {
    double g = gap[k];
    if (!(g > 0)) {
      g = 1e-16;
      ++est.clipped;
    }
    b = std::min(b, g);
    est.b[k] = b;
    const double w = std::pow(static_cast<double>(k), 1 - q);
    est.scaled[k] = w * b;
    if (k >= 1) smin = std::min(smin, w * g);
    est.scaled_running_min[k] = k >= 1 ? smin : w * g;
    if (k >= 1) {
      lx.push_back(std::log(static_cast<double>(k)));
      ly.push_back(std::log(b));
    }
    if (k >= 2) {
      llx.push_back(std::log(std::log(static_cast<double>(k))));
      lly.push_back(std::log(b));
    }
  }
  est.log_slope = LeastSquaresSlope(lx, ly);
  est.loglog_slope = LeastSquaresSlope(llx, lly);
  // Scaled series not improving over the second half.
  const int64_t half = (n - 1) / 2;
  if (half >= 1) {
    double first = kInf, second = kInf;
    for (int64_t k = 1; k < n; ++k) {
      double& slot = k <= half ? first : second;
      slot = std::min(slot, est.scaled[k]);
    }
    est.non_convergent = second >= first;
  }
  return est;
}

RateEstimate EstimateRate(const Trace& trace, double q) {
  Require(trace.has_reference, "rate estimate needs the gap channel");
  return EstimateRate(std::span<const double>(trace.gap), q);
}

double Spread(std::span<const double> witness) {
  if (witness.empty()) return 0;
  const auto [lo, hi] = std::minmax_element(witness.begin(), witness.end());
  return *hi - *lo;
}

std::vector<double> ConsensusSpread(const Trace& trace,
                                    const ProblemInstance& problem) {
  Require(problem.IsScalarConsensus(),
          "consensus spread needs identity selections on a shared scalar");
  Require(!trace.witness.empty(), "consensus spread needs the witness channel");
  std::vector<double> out(trace.rows());
  for (int64_t row = 0; row < trace.rows(); ++row) {
    out[row] = Spread(std::span<const double>(
        trace.witness.data() + row * trace.primal_dim, trace.primal_dim));
  }
  return out;
}

Vector TracePrimalAverage(const Trace& t) {
  Require(!t.witness.empty(), "primal average needs the witness channel");
  Require(t.stride == 1, "primal average needs every step recorded");
  ErgodicAverage avg;
  const int m = t.num_edges;
  for (int64_t k = 0; k < t.iterations(); ++k) {
    const uint8_t* mask = t.mask(k + 1);
    double sum = 0;
    int active = 0;
    for (int e = 0; e < m; ++e) {
      if (mask[e]) {
        sum += t.alpha[k * m + e];
        ++active;
      }
    }
    if (active == 0) continue;
    avg.Add(t.WitnessRow(k), sum / active);
  }
  return avg.Value();
}

}  // namespace dualdec
