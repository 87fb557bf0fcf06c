#include "dualdec/stepsize.h"

#include <cmath>
#include <string>

#include "dualdec/errors.h"

namespace dualdec {

namespace {

constexpr double kOrbitTol = 1e-9;

double LogDecayAt(double c, double m) {
  return c / ((m + 2) * std::log(m + 2));
}

[[noreturn]] void OffOrbit(const StepsizeRule& rule, double alpha) {
  Fail(ErrorKind::kInvalidArgument, "stepsize " + std::to_string(alpha) +
                                        " is not on the orbit of " +
                                        RuleName(rule));
}

int64_t CheckedIndex(const StepsizeRule& rule, double alpha, double m_real) {
  if (!std::isfinite(m_real) || m_real < -0.5 || m_real > 9e18) {
    OffOrbit(rule, alpha);
  }
  int64_t m = std::llround(m_real);
  if (m < 0) m = 0;
  // Rounding can miss by one step on very long orbits; probe neighbours.
  for (int64_t cand : {m, m - 1, m + 1}) {
    if (cand < 0) continue;
    if (std::abs(StepsizeAt(rule, cand) - alpha) <= kOrbitTol * alpha) {
      return cand;
    }
  }
  OffOrbit(rule, alpha);
}

}  // namespace

double StepsizeAt(const StepsizeRule& rule, int64_t m) {
  const double mm = static_cast<double>(m);
  if (const auto* r = std::get_if<PowerDecay>(&rule)) {
    return r->c / std::pow(1 + mm, r->q);
  }
  if (const auto* r = std::get_if<LogDecay>(&rule)) return LogDecayAt(r->c, mm);
  if (const auto* r = std::get_if<ClosedFormShift>(&rule)) {
    return r->c0 * std::pow(1 + mm, -r->q);
  }
  return std::get<ConstantStep>(rule).c;
}

int64_t OrbitIndex(const StepsizeRule& rule, double alpha) {
  if (!(alpha > 0)) OffOrbit(rule, alpha);
  if (const auto* r = std::get_if<PowerDecay>(&rule)) {
    return CheckedIndex(rule, alpha, std::pow(r->c / alpha, 1 / r->q) - 1);
  }
  if (const auto* r = std::get_if<ClosedFormShift>(&rule)) {
    return CheckedIndex(rule, alpha, std::pow(alpha / r->c0, -1 / r->q) - 1);
  }
  if (const auto* r = std::get_if<LogDecay>(&rule)) {
    // (m + 2) log(m + 2) = c / alpha is increasing in m; bisect on reals.
    const double target = r->c / alpha;
    if (target < 2 * std::log(2.0) * (1 - kOrbitTol)) OffOrbit(rule, alpha);
    double lo = 0, hi = 1;
    while ((hi + 2) * std::log(hi + 2) < target) {
      hi *= 2;
      if (hi > 9e18) OffOrbit(rule, alpha);
    }
    for (int i = 0; i < 200 && hi - lo > 1e-6; ++i) {
      const double mid = 0.5 * (lo + hi);
      ((mid + 2) * std::log(mid + 2) < target ? lo : hi) = mid;
    }
    return CheckedIndex(rule, alpha, 0.5 * (lo + hi));
  }
  const double c = std::get<ConstantStep>(rule).c;
  if (std::abs(alpha - c) > kOrbitTol * c) OffOrbit(rule, alpha);
  return 0;
}

double StepsizeNext(const StepsizeRule& rule, double alpha) {
  if (std::holds_alternative<ConstantStep>(rule)) {
    OrbitIndex(rule, alpha);
    return alpha;
  }
  return StepsizeAt(rule, OrbitIndex(rule, alpha) + 1);
}

bool SatisfiesDiminishingConditions(const StepsizeRule& rule) {
  if (const auto* r = std::get_if<PowerDecay>(&rule)) {
    return r->c > 0 && r->q > 0.5 && r->q <= 1;
  }
  if (const auto* r = std::get_if<ClosedFormShift>(&rule)) {
    return r->c0 > 0 && r->q > 0.5 && r->q <= 1;
  }
  if (const auto* r = std::get_if<LogDecay>(&rule)) return r->c > 0;
  return false;
}

void ValidateRule(const StepsizeRule& rule) {
  if (const auto* r = std::get_if<PowerDecay>(&rule)) {
    Require(r->c > 0 && r->q > 0, "power-decay stepsize needs c > 0, q > 0");
  } else if (const auto* r = std::get_if<ClosedFormShift>(&rule)) {
    Require(r->c0 > 0 && r->q > 0, "closed-form shift needs c0 > 0, q > 0");
  } else if (const auto* r = std::get_if<LogDecay>(&rule)) {
    Require(r->c > 0, "log-decay stepsize needs c > 0");
  } else {
    Require(std::get<ConstantStep>(rule).c > 0, "constant stepsize must be > 0");
  }
}

std::string RuleName(const StepsizeRule& rule) {
  if (const auto* r = std::get_if<PowerDecay>(&rule)) {
    return "power_decay(c=" + std::to_string(r->c) +
           ", q=" + std::to_string(r->q) + ")";
  }
  if (const auto* r = std::get_if<ClosedFormShift>(&rule)) {
    return "closed_form_shift(c0=" + std::to_string(r->c0) +
           ", q=" + std::to_string(r->q) + ")";
  }
  if (const auto* r = std::get_if<LogDecay>(&rule)) {
    return "log_decay(c=" + std::to_string(r->c) + ")";
  }
  return "constant(c=" + std::to_string(std::get<ConstantStep>(rule).c) + ")";
}

}  // namespace dualdec
