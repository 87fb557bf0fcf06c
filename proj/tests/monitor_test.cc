#include <doctest.h>

#include <cmath>

#include "dualdec/errors.h"
#include "dualdec/monitor.h"
#include "dualdec/reference.h"
#include "fixtures.h"

using namespace dualdec;
using namespace dualdec::testing;

namespace {

RunConfig BoxedSync(int64_t iterations) {
  RunConfig c;
  c.problem = Shared(PathQuadratic(Interval{-10, 16}));
  c.iterations = iterations;
  c.reference = ComputeReference(*c.problem);
  return c;
}

// Independent evaluation of the best-value bound for a synchronous noiseless
// trace (m1 = 1, K = 0): first violating k, or -1.
int64_t FirstViolation(const Trace& t, double r2, double g) {
  double best = -kInf, sum_sq = 0, sum = t.step_alpha[0];
  for (int64_t k = 0; k <= t.iterations(); ++k) {
    if (k > 0) {
      sum_sq += t.step_alpha[k] * t.step_alpha[k];
      sum += t.step_alpha[k];
    }
    best = std::max(best, t.q[k]);
    const double lhs = t.q_star - best;
    const double rhs = (r2 + g * g * sum_sq) / (2 * sum);
    if ((rhs - lhs) / std::max(1.0, std::abs(rhs)) < -1e-9) return k;
  }
  return -1;
}

}  // namespace

TEST_CASE("cyclic over two edges gives delta_hat one half") {
  RunConfig c = BoxedSync(1024);
  c.scheduler = CyclicSchedule{};
  const RunResult r = Run(c);
  const MonitorReport m = Monitor(r.trace, c);
  CHECK(m.delta_applicable);
  CHECK(m.delta_hat == 0.5);
  CHECK(m.violations.empty());
}

TEST_CASE("best-value bound on synchronous boxed quadratic") {
  const RunConfig c = BoxedSync(10000);
  const RunResult r = Run(c);
  const MonitorReport m = Monitor(r.trace, c);
  REQUIRE(m.best_value_bound.applicable);
  CHECK(m.best_value_bound.m1 == 1);
  CHECK(m.best_value_bound.k_noise == 0);
  CHECK(m.best_value_bound.r_squared == doctest::Approx(18).epsilon(1e-12));
  CHECK(m.best_value_bound.first_violation == -1);
  CHECK(m.best_value_bound.min_relative_slack >= -1e-9);
  CHECK(FirstViolation(r.trace, 18, m.g_hat) == -1);
  double g_hat = 0;
  for (double v : r.trace.residual) g_hat = std::max(g_hat, v);
  CHECK(m.g_hat == g_hat);
}

TEST_CASE("corrupted Q channel reports the first violation") {
  const RunConfig c = BoxedSync(2000);
  RunResult r = Run(c);
  const MonitorReport clean = Monitor(r.trace, c);
  REQUIRE(clean.best_value_bound.first_violation == -1);
  for (double& q : r.trace.q) q -= 2;
  const int64_t expected = FirstViolation(r.trace, 18, clean.g_hat);
  REQUIRE(expected > 0);
  const BoundCheck b = CheckBestValueBound(r.trace, 1, 18, 0, clean.g_hat);
  CHECK(b.first_violation == expected);
  CHECK(b.min_relative_slack < -1e-9);
}

TEST_CASE("rate estimate on synthetic gaps") {
  std::vector<double> gap(10001);
  gap[0] = 1;
  for (size_t k = 1; k < gap.size(); ++k) gap[k] = 1.0 / k;
  const RateEstimate r = EstimateRate(gap, 0.51);
  CHECK(r.log_slope == doctest::Approx(-1).epsilon(1e-6));
  CHECK(r.scaled[10000] == doctest::Approx(std::pow(10000.0, -0.51)).epsilon(1e-12));
  CHECK_FALSE(r.non_convergent);

  std::vector<double> flat(10001, 0.5);
  const RateEstimate f = EstimateRate(flat, 0.51);
  CHECK(f.non_convergent);
  CHECK(f.scaled[10000] > f.scaled[100]);

  std::vector<double> neg = {1, 0.5, -0.1, 0};
  CHECK(EstimateRate(neg, 0.51).clipped == 2);
}

TEST_CASE("spread") {
  const double a[] = {3, 3, 3};
  const double b[] = {0, 3, 6};
  CHECK(Spread(a) == 0);
  CHECK(Spread(b) == 6);
}

TEST_CASE("consensus spread and primal average from a trace") {
  RunConfig c = BoxedSync(20);
  c.record_witness = true;
  const RunResult r = Run(c);
  const std::vector<double> spread = ConsensusSpread(r.trace, *c.problem);
  CHECK(spread[0] == 6);
  CHECK(spread.size() == static_cast<size_t>(r.trace.rows()));
  const Vector avg = TracePrimalAverage(r.trace);
  CHECK(avg.size() == 3);
  c.record_witness = false;
  CHECK_THROWS_AS(ConsensusSpread(Run(c).trace, *c.problem), Error);
}

TEST_CASE("constant stepsize is flagged, biased noise only noted") {
  RunConfig c = BoxedSync(64);
  c.stepsize = {ConstantStep{0.1}};
  const MonitorReport m = Monitor(Run(c).trace, c);
  REQUIRE(m.violations.size() == 1);
  CHECK(m.violations[0].find("Assumption 3") != std::string::npos);

  RunConfig b = BoxedSync(64);
  b.noise = BiasedNoise{{}, 0.01, ZeroMeanNoise{}};
  const MonitorReport mb = Monitor(Run(b).trace, b);
  CHECK(mb.violations.empty());
  CHECK_FALSE(mb.notes.empty());
  CHECK_FALSE(mb.best_value_bound.applicable);
}
