#include "dualdec/dual_engine.h"

#include "dualdec/errors.h"

namespace dualdec {

namespace {

// One rule per edge, or a single rule shared by all of them.
void CheckRules(std::span<const StepsizeRule> rules, int num_edges) {
  RequireDims(static_cast<int>(rules.size()) == num_edges ||
                  (rules.size() == 1 && num_edges > 0),
              "need one stepsize rule per edge (or a single shared rule)");
}

const StepsizeRule& RuleOf(std::span<const StepsizeRule> rules, int e) {
  return rules.size() == 1 ? rules[0] : rules[e];
}

}  // namespace

DualState DualState::Initial(const ProblemInstance& problem,
                             std::span<const StepsizeRule> rules,
                             const std::optional<Vector>& lambda0) {
  if (problem.num_edges() > 0) CheckRules(rules, problem.num_edges());
  DualState s;
  if (lambda0) {
    RequireDims(lambda0->size() == problem.dual_dim(),
                "initial dual vector dimension mismatch");
    s.lambda = *lambda0;
  } else {
    s.lambda = Vector::Zero(problem.dual_dim());
  }
  for (const StepsizeRule& r : rules) ValidateRule(r);
  for (int e = 0; e < problem.num_edges(); ++e) {
    s.alpha.push_back(InitialStepsize(RuleOf(rules, e)));
  }
  s.gamma.assign(problem.num_edges(), 0);
  return s;
}

SupergradientOracle::SupergradientOracle(const ProblemInstance& problem,
                                         Execution execution)
    : evaluator_(problem, execution) {
  result_.g.resize(problem.dual_dim());
}

const Supergradient& SupergradientOracle::Evaluate(const Vector& lambda) {
  const DualValue& dv = evaluator_.Evaluate(lambda);
  const ProblemInstance& p = evaluator_.problem();
  ConstraintResidualInto(
      p, std::span<const double>(dv.witness.data(), dv.witness.size()),
      std::span<double>(result_.g.data(), result_.g.size()));
  result_.witness = dv.witness;
  result_.dual_value = dv.value;
  result_.tie_broken = dv.tie_broken;
  return result_;
}

Supergradient ComputeSupergradient(const ProblemInstance& problem,
                                   const Vector& lambda) {
  SupergradientOracle oracle(problem);
  return oracle.Evaluate(lambda);
}

DualState SyncStep(const ProblemInstance& problem, const DualState& state,
                   double alpha, const Vector& error) {
  Require(alpha > 0, "stepsize must be positive");
  RequireDims(error.size() == problem.dual_dim(),
              "error vector dimension mismatch");
  const Supergradient sg = ComputeSupergradient(problem, state.lambda);
  DualState next = state;
  for (Eigen::Index r = 0; r < next.lambda.size(); ++r) {
    next.lambda[r] = state.lambda[r] + alpha * (sg.g[r] + error[r]);
  }
  for (auto& g : next.gamma) ++g;
  ++next.k;
  return next;
}

void ApplyAsyncUpdate(const ProblemInstance& problem, DualState& state,
                      const Vector& g, std::span<const uint8_t> mask,
                      const Vector& error,
                      std::span<const StepsizeRule> rules,
                      StepsizeClock clock) {
  const int m = problem.num_edges();
  RequireDims(static_cast<int>(mask.size()) == m, "mask length mismatch");
  if (m > 0) CheckRules(rules, m);
  RequireDims(error.size() == problem.dual_dim() &&
                  g.size() == problem.dual_dim(),
              "error/supergradient dimension mismatch");
  for (int e = 0; e < m; ++e) {
    if (!mask[e]) continue;
    const double a = state.alpha[e];
    const int lo = problem.lambda_offset(e);
    for (int r = lo; r < lo + problem.edge_dim(e); ++r) {
      state.lambda[r] = state.lambda[r] + a * (g[r] + error[r]);
    }
    if (clock == StepsizeClock::kLocal) {
      state.alpha[e] = StepsizeNext(RuleOf(rules, e), a);
    }
    ++state.gamma[e];
  }
  ++state.k;
  if (clock == StepsizeClock::kGlobal) {
    for (int e = 0; e < m; ++e) state.alpha[e] = StepsizeAt(RuleOf(rules, e), state.k);
  }
}

DualState AsyncStep(const ProblemInstance& problem, const DualState& state,
                    std::span<const uint8_t> mask, const Vector& error,
                    std::span<const StepsizeRule> rules, StepsizeClock clock) {
  RequireDims(static_cast<int>(mask.size()) == problem.num_edges(),
              "mask length mismatch");
  const Supergradient sg = ComputeSupergradient(problem, state.lambda);
  DualState next = state;
  ApplyAsyncUpdate(problem, next, sg.g, mask, error, rules, clock);
  return next;
}

void ErgodicAverage::Add(const Vector& witness, double weight) {
  if (!(weight > 0)) return;
  if (weighted_sum_.size() == 0) weighted_sum_ = Vector::Zero(witness.size());
  RequireDims(witness.size() == weighted_sum_.size(),
              "witness dimension changed");
  weighted_sum_ += weight * witness;
  total_weight_ += weight;
}

Vector ErgodicAverage::Value() const {
  Require(total_weight_ > 0, "primal average of an empty trace");
  return weighted_sum_ / total_weight_;
}

Vector PrimalAverage(std::span<const WeightedWitness> samples) {
  ErgodicAverage avg;
  for (const WeightedWitness& s : samples) avg.Add(s.witness, s.weight);
  return avg.Value();
}

}  // namespace dualdec
