#include <doctest.h>

#include <cmath>

#include "dualdec/errors.h"
#include "dualdec/random.h"
#include "fixtures.h"

using namespace dualdec;
using namespace dualdec::testing;

namespace {
Vector V(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  int i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
}  // namespace

TEST_CASE("linear coefficients on the 3-path") {
  const ProblemInstance p = PathQuadratic();
  for (int i = 0; i < 3; ++i) {
    CHECK(LocalLinearCoefficient(p, i, V({0, 0}))[0] == 0);
  }
  // c_1 = l12, c_2 = l23 - l12, c_3 = -l23
  CHECK(LocalLinearCoefficient(p, 0, V({-3, -3}))[0] == -3);
  CHECK(LocalLinearCoefficient(p, 1, V({-3, -3}))[0] == 0);
  CHECK(LocalLinearCoefficient(p, 2, V({-3, -3}))[0] == 3);
  CHECK_THROWS_AS(LocalLinearCoefficient(p, 0, V({1})), Error);
}

TEST_CASE("single agent: empty coefficient sum, empty residual") {
  const ProblemInstance p =
      ProblemInstance::Consensus(Topology::Build(1, {}), {Quadratic(1, 2)});
  CHECK(LocalLinearCoefficient(p, 0, Vector(0))[0] == 0);
  CHECK(ConstraintResidual(p, V({2})).size() == 0);
}

TEST_CASE("constraint residual") {
  const ProblemInstance p = PathQuadratic();
  CHECK(ConstraintResidual(p, V({3, 3, 3})) == V({0, 0}));
  CHECK(ConstraintResidual(p, V({0, 3, 6})) == V({-3, -3}));
  CHECK_THROWS_AS(ConstraintResidual(p, V({1, 2})), Error);
}

TEST_CASE("Lagrangian values") {
  const ProblemInstance p = PathQuadratic(Interval{-10, 16});
  // (1/2)(9 + 0 + 9) = 9 at consensus
  CHECK(EvaluateLagrangian(p, V({3, 3, 3}), V({-3, -3})) == 9);
  CHECK(EvaluateLagrangian(p, V({1, 2, 5}), V({0, 0})) == PrimalCost(p, V({1, 2, 5})));
  // 0 + <(1, 0), (-3, -3)>
  CHECK(EvaluateLagrangian(p, V({0, 3, 6}), V({1, 0})) == -3);
  CHECK_THROWS_AS(EvaluateLagrangian(p, V({20, 3, 6}), V({0, 0})), Error);
}

TEST_CASE("dual values of the 3-path") {
  const ProblemInstance p = PathQuadratic();
  const DualValue at0 = EvaluateDual(p, V({0, 0}));
  CHECK(at0.value == 0);
  CHECK(at0.witness == V({0, 3, 6}));
  const DualValue at_star = EvaluateDual(p, V({-3, -3}));
  CHECK(at_star.value == 9);
  CHECK(at_star.witness == V({3, 3, 3}));
}

TEST_CASE("entropy agent dual value") {
  // c = 0: log(2x) + 1 = 0 -> x = e^-1 / 2, value x log(2x) = -x
  const ProblemInstance p = ProblemInstance::Consensus(
      Topology::Build(1, {}), {Entropy(2, Interval{0.01, 10})});
  const DualValue d = EvaluateDual(p, Vector(0));
  const double x = std::exp(-1.0) / 2;
  CHECK(d.witness[0] == doctest::Approx(x).epsilon(1e-12));
  CHECK(d.value == doctest::Approx(-x).epsilon(1e-12));
}

TEST_CASE("separability: Q equals the Lagrangian at the witness") {
  const ProblemInstance p = MixedVectorProblem();
  Rng rng(3);
  for (int t = 0; t < 100; ++t) {
    Vector lambda(p.dual_dim());
    for (int r = 0; r < p.dual_dim(); ++r) lambda[r] = rng.Uniform(-3, 3);
    const DualValue d = EvaluateDual(p, lambda);
    const double l = EvaluateLagrangian(p, d.witness, lambda);
    CHECK(std::abs(d.value - l) <= 1e-9 * (1 + std::abs(l)));
  }
}

TEST_CASE("weak duality on sampled feasible points") {
  const ProblemInstance p = PathQuadratic(Interval{-10, 16});
  Rng rng(5);
  for (int t = 0; t < 200; ++t) {
    Vector lambda(2);
    lambda << rng.Uniform(-8, 8), rng.Uniform(-8, 8);
    const double z = rng.Uniform(-10, 16);
    CHECK(EvaluateDual(p, lambda).value <= PrimalCost(p, Vector::Constant(3, z)) + 1e-12);
  }
}

TEST_CASE("concavity along random chords") {
  const ProblemInstance p = MixedVectorProblem();
  Rng rng(8);
  for (int t = 0; t < 200; ++t) {
    Vector a(p.dual_dim()), b(p.dual_dim());
    for (int r = 0; r < p.dual_dim(); ++r) {
      a[r] = rng.Uniform(-4, 4);
      b[r] = rng.Uniform(-4, 4);
    }
    const double th = rng.Uniform();
    const double qa = EvaluateDual(p, a).value, qb = EvaluateDual(p, b).value;
    const double mid = EvaluateDual(p, th * a + (1 - th) * b).value;
    CHECK(mid >= th * qa + (1 - th) * qb - 1e-9 * (1 + std::abs(qa) + std::abs(qb)));
  }
}

TEST_CASE("linear coefficients are additive in lambda") {
  const ProblemInstance p = MixedVectorProblem();
  Rng rng(9);
  Vector a(p.dual_dim()), b(p.dual_dim());
  for (int r = 0; r < p.dual_dim(); ++r) {
    a[r] = std::ldexp(std::round(rng.Uniform(-64, 64)), -3);
    b[r] = std::ldexp(std::round(rng.Uniform(-64, 64)), -3);
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(LocalLinearCoefficient(p, i, a + b) ==
          LocalLinearCoefficient(p, i, a) + LocalLinearCoefficient(p, i, b));
  }
}

TEST_CASE("constraint rank") {
  const RankReport path = CheckConstraintRank(PathQuadratic());
  CHECK(path.full_rank);
  CHECK(path.rank == 2);
  const std::vector<AgentPair> tri = {{0, 1}, {1, 2}, {0, 2}};
  const ProblemInstance triangle = ProblemInstance::Consensus(
      Topology::Build(3, tri), {Quadratic(1, 0), Quadratic(1, 1), Quadratic(1, 2)});
  const RankReport r = CheckConstraintRank(triangle);
  CHECK(r.rank == 2);
  CHECK(r.dual_dim == 3);
  CHECK_FALSE(r.full_rank);
  const RankReport none = CheckConstraintRank(
      ProblemInstance::Consensus(Topology::Build(1, {}), {Quadratic(1, 0)}));
  CHECK(none.full_rank);
  CHECK(none.rank == 0);
}

TEST_CASE("serial and OpenMP dual evaluation agree bitwise") {
  std::vector<LocalProblem> locals;
  Rng rng(17);
  const int n = 300;
  for (int i = 0; i < n; ++i) {
    if (i % 3 == 0) {
      locals.push_back(Hinge(rng.Uniform(0.2, 1), rng.Uniform(2, 8), Interval{-50, 50}, 0.005));
    } else {
      locals.push_back(Entropy(rng.Uniform(1, 5), Interval{1e-4, 50}));
    }
  }
  const ProblemInstance p = ProblemInstance::Consensus(Topology::Path(n), locals);
  Vector lambda(p.dual_dim());
  for (int r = 0; r < p.dual_dim(); ++r) lambda[r] = rng.Uniform(-2, 2);
  const DualValue a = EvaluateDual(p, lambda);
  const DualValue b = EvaluateDualSerial(p, lambda);
  CHECK(a.value == b.value);
  CHECK(a.witness == b.witness);
}

TEST_CASE("unbounded local problem names the agent") {
  LocalProblem free_linear;
  free_linear.box = {Interval{}};
  const ProblemInstance p = ProblemInstance::Consensus(
      Topology::Path(2), {Quadratic(1, 0), free_linear});
  Vector lambda(1);
  lambda << 1.0;
  try {
    EvaluateDual(p, lambda);
    FAIL("expected an oracle failure");
  } catch (const OracleFailure& f) {
    CHECK(f.agent() == 1);
  }
}

TEST_CASE("local problem validation") {
  LocalProblem bad = Quadratic(-1, 0);
  CHECK_THROWS_AS(bad.Validate(), Error);
  LocalProblem entropy = Entropy(2, Interval{0, 1});
  CHECK_THROWS_AS(entropy.Validate(), Error);
  LocalProblem off = Quadratic(1, 0);
  off.atoms = {QuadraticAtom{1, 1, 0}};
  CHECK_THROWS_AS(off.Validate(), Error);
}
