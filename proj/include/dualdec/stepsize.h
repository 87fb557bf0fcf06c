#ifndef DUALDEC_STEPSIZE_H_
#define DUALDEC_STEPSIZE_H_

#include <cstdint>
#include <string>
#include <variant>

namespace dualdec {

// alpha_m = c / (1 + m)^q
struct PowerDecay {
  double c = 1;
  double q = 1;
  friend bool operator==(const PowerDecay&, const PowerDecay&) = default;
};

// alpha_m = c / ((m + 2) log(m + 2))
struct LogDecay {
  double c = 1;
  friend bool operator==(const LogDecay&, const LogDecay&) = default;
};

// Local-clock map A(alpha) = c0 ((alpha / c0)^(-1/q) + 1)^(-q), started at
// c0. Its orbit is c0 (1 + m)^(-q).
struct ClosedFormShift {
  double c0 = 0.15;
  double q = 0.51;
  friend bool operator==(const ClosedFormShift&,
                         const ClosedFormShift&) = default;
};

// Diagnostic only: not square summable.
struct ConstantStep {
  double c = 0.1;
  friend bool operator==(const ConstantStep&, const ConstantStep&) = default;
};

using StepsizeRule =
    std::variant<PowerDecay, LogDecay, ClosedFormShift, ConstantStep>;

// m-th element of the rule's sequence (m = 0 is the initial stepsize).
double StepsizeAt(const StepsizeRule& rule, int64_t m);
inline double InitialStepsize(const StepsizeRule& rule) {
  return StepsizeAt(rule, 0);
}

// Recovers m with StepsizeAt(rule, m) == alpha up to 1e-9 relative. Throws
// when alpha is not on the orbit.
int64_t OrbitIndex(const StepsizeRule& rule, double alpha);

// A(alpha): the next element of the sequence alpha belongs to.
double StepsizeNext(const StepsizeRule& rule, double alpha);

// Positive, non-increasing, sum = inf and sum of squares < inf.
bool SatisfiesDiminishingConditions(const StepsizeRule& rule);
void ValidateRule(const StepsizeRule& rule);
std::string RuleName(const StepsizeRule& rule);

}  // namespace dualdec

#endif  // DUALDEC_STEPSIZE_H_
