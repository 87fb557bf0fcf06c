#ifndef DUALDEC_MONITOR_H_
#define DUALDEC_MONITOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualdec/runtime.h"

namespace dualdec {

struct BoundCheck {
  bool applicable = false;
  std::string skipped_reason;
  double m1 = 1;
  double r_squared = 0;
  double k_noise = 0;   // second-moment bound K
  double g = 0;         // G used (G_hat)
  std::vector<double> lhs;   // Q* - Q_best[k]
  std::vector<double> rhs;
  std::vector<uint8_t> holds;
  int64_t first_violation = -1;
  double min_relative_slack = kInf;  // min (rhs - lhs) / max(1, |rhs|)
};

struct MonitorReport {
  // Activation rate: min over checkpoints k = 2^j in [K/4, K] of gamma_e[k]/k.
  double delta_hat = 0;
  bool delta_applicable = false;
  // Growth constant: max |g_k|^2 / (1 + |lambda_k - lambda*|^2) (needs lambda*).
  std::optional<double> c_hat;
  int64_t c_hat_step = -1;
  // Supergradient bound: max |g_k|.
  double g_hat = 0;
  int64_t g_hat_step = -1;
  BoundCheck best_value_bound;
  // k alpha_k (Q* - Q(lambda_k)) and its running min (needs Q*).
  std::vector<double> rate_product;
  std::vector<double> rate_product_running_min;
  // Violations that make the run fall outside the analysed regime.
  std::vector<std::string> violations;
  // Observations that do not invalidate the run.
  std::vector<std::string> notes;
};

MonitorReport Monitor(const Trace& trace, const RunConfig& config);

// Best-value bound on an arbitrary trace: Q* - Q_best[k] <=
// (m1 R^2 + (m1 K + G^2) sum_{i=1}^k alpha_i^2) / (2 sum_{i=0}^k alpha_i).
BoundCheck CheckBestValueBound(const Trace& trace, double m1, double r_squared,
                               double k_noise, double g);

struct RateEstimate {
  std::vector<double> b;            // running min of clipped gaps
  std::vector<double> scaled;       // k^{1-q} b_k
  std::vector<double> scaled_running_min;  // min_{1<=i<=k} i^{1-q} gap_i
  double log_slope = 0;             // fit of log b_k on log k
  double loglog_slope = 0;          // fit of log b_k on log log k
  int64_t clipped = 0;              // gaps <= 0 replaced by 1e-16
  bool non_convergent = false;
};

RateEstimate EstimateRate(std::span<const double> gap, double q);
RateEstimate EstimateRate(const Trace& trace, double q);

// max_{i,j} |x_i - x_j| for every kept witness row (scalar consensus only).
std::vector<double> ConsensusSpread(const Trace& trace,
                                    const ProblemInstance& problem);
double Spread(std::span<const double> witness);

// Ergodic average of the witnesses x*_{lambda_m}, weighted by the mean
// stepsize of the edges active in the transition m -> m+1; idle steps get no
// weight. Needs the witness channel at stride 1.
Vector TracePrimalAverage(const Trace& trace);

}  // namespace dualdec

#endif  // DUALDEC_MONITOR_H_
