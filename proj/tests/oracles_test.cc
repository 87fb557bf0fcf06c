#include <doctest.h>

#include <cmath>

#include "dualdec/errors.h"
#include "dualdec/oracles.h"
#include "dualdec/random.h"

using namespace dualdec;

namespace {

double Objective(std::span<const CostAtom> atoms, double rho, double c, double x) {
  double v = rho * x * x + c * x;
  for (const CostAtom& a : atoms) v += AtomValue(a, x);
  return v;
}

// Minimum of the objective on a uniform grid, refined once around the best
// grid point.
double GridMin(std::span<const CostAtom> atoms, double rho, double c, Interval box,
               double step) {
  double best = kInf, at = box.lo;
  for (double x = box.lo; x <= box.hi; x += step) {
    const double v = Objective(atoms, rho, c, x);
    if (v < best) {
      best = v;
      at = x;
    }
  }
  const double lo = std::max(box.lo, at - step), hi = std::min(box.hi, at + step);
  for (double x = lo; x <= hi; x += step / 1000) {
    best = std::min(best, Objective(atoms, rho, c, x));
  }
  return best;
}

}  // namespace

TEST_CASE("quadratic closed form") {
  const ScalarResult a = SolveQuadratic(1, 3, Interval{}, 0, 0);
  CHECK(a.x == 3);
  CHECK(a.value == 0);
  CHECK_FALSE(a.tie_broken);
  // x* = a - c / w = 3, value 9/2 - 9
  const ScalarResult b = SolveQuadratic(1, 0, Interval{-10, 16}, -3, 0);
  CHECK(b.x == 3);
  CHECK(b.value == -4.5);
  CHECK(SolveQuadratic(1, 0, Interval{-10, 16}, -100, 0).x == 16);
}

TEST_CASE("hinge sign analysis") {
  const Interval box{0, 10};
  // 0 in [c - w, c] = [-0.5, 0.5] at the knee; value 0 + 0.5 * 2
  const ScalarResult knee = SolveHinge(1, 2, 0, box, 0.5, 0);
  CHECK(knee.x == 2);
  CHECK(knee.value == 1.0);
  const ScalarResult up = SolveHinge(1, 2, 0, box, -0.2, 0);
  CHECK(up.x == 10);
  CHECK_FALSE(up.tie_broken);
  // -1 (0 - 2) + 0 = 2
  const ScalarResult down = SolveHinge(1, 2, 0, box, 1.5, 0);
  CHECK(down.x == 0);
  CHECK(down.value == 2);
  const ScalarResult flat_right = SolveHinge(1, 2, 0, box, 0, 0);
  CHECK(flat_right.x == 2);
  CHECK(flat_right.tie_broken);
  const ScalarResult flat_left = SolveHinge(1, 2, 0, box, 1, 0);
  CHECK(flat_left.x == 2);
  CHECK(flat_left.tie_broken);
  CHECK_THROWS_AS(SolveHinge(1, 2, 0, Interval{0, kInf}, -0.2, 0), OracleFailure);
}

TEST_CASE("entropy stationarity") {
  const Interval box{0.01, 10};
  // log(x) + 1 - 1 = 0 -> x = 1, value 0 - 1
  const ScalarResult a = SolveEntropy(1, box, -1);
  CHECK(a.x == doctest::Approx(1).epsilon(1e-15));
  CHECK(a.value == doctest::Approx(-1).epsilon(1e-15));
  CHECK(SolveEntropy(2, box, 0).x == doctest::Approx(std::exp(-1.0) / 2).epsilon(1e-15));
  CHECK(SolveEntropy(1, Interval{0.5, 10}, 10).x == 0.5);
  CHECK_THROWS_AS(SolveEntropy(1, Interval{0, 1}, 0), Error);
  // very negative c: stationary point overflows, clamps to the upper bound
  CHECK(SolveEntropy(1, box, -1e6).x == 10);
}

TEST_CASE("fallback examples") {
  const CostAtom q[] = {QuadraticAtom{0, 1, 3}};
  CHECK(SolveScalarFallback(q, 0, Interval{0, 10}, 0).x == doctest::Approx(3).epsilon(1e-10));
  const ScalarResult lin = SolveScalarFallback({}, 0, Interval{-1, 1}, 1);
  CHECK(lin.x == -1);
  // Regularized hinge written as hinge + quadratic(w = 0.01, a = 0): compare
  // against a fine grid.
  const CostAtom reg[] = {HingeAtom{0, 1, 2, 0}, QuadraticAtom{0, 0.01, 0}};
  const ScalarResult r = SolveScalarFallback(reg, 0, Interval{0, 10}, 0.5);
  CHECK(r.value <= GridMin(reg, 0, 0.5, Interval{0, 10}, 1e-3) + 1e-10);
}

TEST_CASE("closed forms agree with the fallback on fuzzed parameters") {
  Rng rng(2024);
  for (int t = 0; t < 1000; ++t) {
    const double lo = rng.Uniform(-10, 0), hi = rng.Uniform(0.5, 10);
    const Interval box{lo, hi};
    const double c = rng.Uniform(-3, 3);
    const double rho = t % 2 ? 0.0 : rng.Uniform(0, 0.5);
    const double w = rng.Uniform(0.1, 2), a = rng.Uniform(-5, 5);

    const CostAtom qa[] = {QuadraticAtom{0, w, a}};
    const ScalarResult q = SolveQuadratic(w, a, box, c, rho);
    CHECK(std::abs(q.value - SolveScalarFallback(qa, rho, box, c).value) <= 1e-8);

    const CostAtom ha[] = {HingeAtom{0, w, a, 0.3}};
    const ScalarResult h = SolveHinge(w, a, 0.3, box, c, rho);
    CHECK(std::abs(h.value - SolveScalarFallback(ha, rho, box, c).value) <= 1e-8);

    const Interval pos{rng.Uniform(1e-4, 0.5), rng.Uniform(1, 10)};
    const double p = rng.Uniform(1, 5);
    const CostAtom ea[] = {EntropyAtom{0, p}};
    const ScalarResult e = SolveEntropy(p, pos, c, rho);
    CHECK(std::abs(e.value - SolveScalarFallback(ea, rho, pos, c).value) <= 1e-8);
  }
}

TEST_CASE("perturbation optimality and value consistency") {
  Rng rng(77);
  for (int t = 0; t < 300; ++t) {
    LocalProblem l;
    l.box = {Interval{rng.Uniform(0.01, 1), rng.Uniform(2, 9)}};
    l.regularizer = t % 3 == 0 ? 0.005 : 0;
    switch (t % 4) {
      case 0: l.atoms = {QuadraticAtom{0, rng.Uniform(0.2, 2), rng.Uniform(-3, 9)}}; break;
      case 1: l.atoms = {HingeAtom{0, rng.Uniform(0.2, 1), rng.Uniform(2, 8), 0}}; break;
      case 2: l.atoms = {EntropyAtom{0, rng.Uniform(1, 5)}}; break;
      default:
        l.atoms = {HingeAtom{0, 0.7, 3, 0}, EntropyAtom{0, 2}, QuadraticAtom{0, 0.3, 1}};
    }
    Vector c(1);
    c << rng.Uniform(-2, 2);
    const OracleResult r = SolveLocal(l, c);
    const double x = r.x[0];
    REQUIRE(l.box[0].Contains(x));
    auto value = [&](double y) { return l.Cost(std::span<const double>(&y, 1)) + c[0] * y; };
    CHECK(std::abs(r.value - value(x)) <= 1e-12 * (1 + std::abs(r.value)));
    for (double d : {1e-6, 1e-3}) {
      CHECK(value(l.box[0].Clamp(x + d)) >= r.value - 1e-9);
      CHECK(value(l.box[0].Clamp(x - d)) >= r.value - 1e-9);
    }
  }
}

TEST_CASE("multi-coordinate local oracle") {
  LocalProblem l;
  l.dim = 2;
  l.box = {Interval{-5, 5}, Interval{0.1, 4}};
  l.atoms = {QuadraticAtom{0, 2, 1}, EntropyAtom{1, 1}, LinearAtom{1, 0.5}};
  Vector c(2);
  c << 1, -1.5;
  const OracleResult r = SolveLocal(l, c);
  // x0 = (2 - 1) / 2; x1: log x + 1 + 0.5 - 1.5 = 0 -> x1 = 1
  CHECK(r.x[0] == 0.5);
  CHECK(r.x[1] == doctest::Approx(1).epsilon(1e-15));
  CHECK_THROWS_AS(SolveLocal(l, Vector::Zero(1)), Error);
}
