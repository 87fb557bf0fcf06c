#ifndef DUALDEC_DUAL_ENGINE_H_
#define DUALDEC_DUAL_ENGINE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dualdec/problem.h"
#include "dualdec/stepsize.h"

namespace dualdec {

// Activation mask: one 0/1 entry per oriented edge.
using Mask = std::vector<uint8_t>;

// How a stepsize advances. kLocal: A(alpha) on each update of that edge.
// kGlobal: every edge uses rule.At(k) for the global step counter k.
enum class StepsizeClock { kLocal, kGlobal };

struct DualState {
  Vector lambda;               // edge blocks in edge order
  std::vector<double> alpha;   // per-edge stepsize, > 0
  std::vector<int64_t> gamma;  // per-edge update count
  int64_t k = 0;

  // lambda0 defaults to zero; alpha starts at each rule's first element.
  static DualState Initial(const ProblemInstance& problem,
                           std::span<const StepsizeRule> rules,
                           const std::optional<Vector>& lambda0 = {});
  friend bool operator==(const DualState& a, const DualState& b) {
    return a.lambda.size() == b.lambda.size() && a.lambda == b.lambda &&
           a.alpha == b.alpha && a.gamma == b.gamma && a.k == b.k;
  }
};

// g = E(x*_lambda), a supergradient of Q at lambda, with the witness used.
struct Supergradient {
  Vector g;
  Vector witness;
  double dual_value = 0;
  bool tie_broken = false;
};

Supergradient ComputeSupergradient(const ProblemInstance& problem,
                                   const Vector& lambda);

// Buffer-reusing variant for simulation loops.
class SupergradientOracle {
 public:
  explicit SupergradientOracle(const ProblemInstance& problem,
                               Execution execution = Execution::kParallel);
  const Supergradient& Evaluate(const Vector& lambda);

 private:
  DualEvaluator evaluator_;
  Supergradient result_;
};

// lambda+ = lambda + alpha (g(lambda) + error) on every edge; gamma and k
// advance, alpha is left to the caller.
DualState SyncStep(const ProblemInstance& problem, const DualState& state,
                   double alpha, const Vector& error);

// Applies one transition with a precomputed supergradient g. Edges with
// mask 1 move by alpha_e (g_e + error_e), take alpha_e <- A(alpha_e) and
// gamma_e + 1; masked-out edges keep all three untouched. k advances.
void ApplyAsyncUpdate(const ProblemInstance& problem, DualState& state,
                      const Vector& g, std::span<const uint8_t> mask,
                      const Vector& error,
                      std::span<const StepsizeRule> rules,
                      StepsizeClock clock = StepsizeClock::kLocal);

// Evaluates the supergradient once at state.lambda and applies the
// transition; every active edge sees the same witness.
DualState AsyncStep(const ProblemInstance& problem, const DualState& state,
                    std::span<const uint8_t> mask, const Vector& error,
                    std::span<const StepsizeRule> rules,
                    StepsizeClock clock = StepsizeClock::kLocal);

// Running weighted average of primal witnesses; zero weights are skipped.
class ErgodicAverage {
 public:
  void Add(const Vector& witness, double weight);
  bool empty() const { return total_weight_ == 0; }
  // Throws when nothing has been added.
  Vector Value() const;

 private:
  Vector weighted_sum_;
  double total_weight_ = 0;
};

struct WeightedWitness {
  Vector witness;
  double weight = 0;
};

Vector PrimalAverage(std::span<const WeightedWitness> samples);

}  // namespace dualdec

#endif  // DUALDEC_DUAL_ENGINE_H_
