#ifndef DUALDEC_RUNTIME_H_
#define DUALDEC_RUNTIME_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include "dualdec/dual_engine.h"
#include "dualdec/noise.h"
#include "dualdec/reference.h"
#include "dualdec/scheduler.h"
#include "dualdec/stepsize.h"

namespace dualdec {

struct RunConfig {
  std::shared_ptr<const ProblemInstance> problem;
  SchedulerSpec scheduler = SynchronousSchedule{};
  // One rule per edge, or a single rule shared by every edge.
  std::vector<StepsizeRule> stepsize = {PowerDecay{0.15, 0.51}};
  StepsizeClock clock = StepsizeClock::kLocal;
  NoiseSpec noise = NoNoise{};
  int64_t iterations = 1000;
  uint64_t seed = 1;
  std::optional<Vector> lambda0;
  // Optional channels; scalar series and masks are always kept.
  bool record_lambda = false;
  bool record_witness = false;
  // Per-edge channels (alpha, gamma, lambda, witness) are kept every
  // `stride` steps plus the final step.
  int64_t stride = 1;
  std::optional<Reference> reference;
  Execution execution = Execution::kParallel;
};

// Throws on inconsistent configs (missing problem, iterations < 1, rule
// count, scheduler and noise validity).
void ValidateRunConfig(const RunConfig& config);
// The per-edge rule list (expands a single shared rule).
std::vector<StepsizeRule> EdgeRules(const RunConfig& config);

// Row k describes lambda_k: the mask that produced it (zero at k = 0), Q,
// gap, running best, |g(lambda_k)|, and the state alpha/gamma at k.
struct Trace {
  int num_edges = 0;
  int dual_dim = 0;
  int primal_dim = 0;
  int64_t stride = 1;
  bool has_reference = false;
  bool has_lambda_star = false;
  double q_star = 0;

  // Full resolution, index k = 0..iterations.
  std::vector<uint8_t> masks;        // (iterations + 1) x num_edges
  std::vector<double> q;
  std::vector<double> gap;           // q_star - q (empty without reference)
  std::vector<double> best_gap;      // q_star - max_{i<=k} q_i
  std::vector<double> residual;      // |E(x*_{lambda_k})| = |g|
  std::vector<double> step_alpha;    // max_e alpha_e at k
  std::vector<double> noise_norm;    // |v (.) e| consumed to reach k
  std::vector<double> dist;          // |lambda_k - lambda*| (if known)

  // Rows kept every `stride` steps plus the last.
  std::vector<int64_t> row_k;
  std::vector<double> alpha;         // rows x num_edges
  std::vector<int64_t> gamma;        // rows x num_edges
  std::vector<double> lambda;        // rows x dual_dim (channel)
  std::vector<double> witness;       // rows x primal_dim (channel)

  int64_t iterations() const { return static_cast<int64_t>(q.size()) - 1; }
  int64_t rows() const { return static_cast<int64_t>(row_k.size()); }
  const uint8_t* mask(int64_t k) const { return masks.data() + k * num_edges; }
  // gamma_e[k] from the masks, for any k.
  std::vector<int64_t> GammaAt(int64_t k) const;
  Vector LambdaRow(int64_t row) const;
  Vector WitnessRow(int64_t row) const;
};

struct RunResult {
  Trace trace;
  DualState state;
};

// Algorithm loop: for k = 0..iterations-1 evaluate the supergradient at
// lambda_k, record row k, draw mask and noise, apply the transition; the
// final state is recorded as row `iterations`. OracleFailure carries the
// step index.
RunResult Run(const RunConfig& config);

// CSV export of the kept rows: k, mask, Q, gap, best_gap, residual,
// alpha_1.., gamma_1.. with shortest round-trip floats.
void WriteTraceCsv(const Trace& trace, std::ostream& out);
// k plus one column per dual (lambda_1..) or primal (x_1..) coordinate at the
// kept rows. Throw when the channel was not recorded.
void WriteLambdaCsv(const Trace& trace, std::ostream& out);
void WriteWitnessCsv(const Trace& trace, std::ostream& out);
// Shortest round-trip decimal.
std::string FormatDouble(double v);

}  // namespace dualdec

#endif  // DUALDEC_RUNTIME_H_
