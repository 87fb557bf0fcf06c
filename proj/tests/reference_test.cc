#include <doctest.h>

#include <cmath>

#include "dualdec/dual_engine.h"
#include "dualdec/errors.h"
#include "dualdec/reference.h"
#include "fixtures.h"

using namespace dualdec;
using namespace dualdec::testing;

TEST_CASE("scalar consensus reference") {
  const Reference r = SolveConsensusScalar(PathQuadratic());
  CHECK(r.x_star[0] == doctest::Approx(3).epsilon(1e-7));
  CHECK(r.f_star == doctest::Approx(9).epsilon(1e-12));
  CHECK(r.method == "golden_section");

  const ProblemInstance hinges = ProblemInstance::Consensus(
      Topology::Path(2), {Hinge(1, 2, Interval{0, 10}), Hinge(1, 4, Interval{0, 10})});
  const Reference h = SolveConsensusScalar(hinges);
  CHECK(h.f_star == doctest::Approx(0).epsilon(1e-12));
  CHECK(std::abs(h.x_star[0] - 4) <= 1e-6);

  const ProblemInstance single =
      ProblemInstance::Consensus(Topology::Build(1, {}), {Quadratic(2, 1.5, Interval{-1, 1})});
  const Reference s = SolveConsensusScalar(single);
  CHECK(s.f_star == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("consensus reference matches a fine scan on mixed families") {
  const ProblemInstance p = ProblemInstance::Consensus(
      Topology::Path(4), {Hinge(0.7, 3, Interval{-50, 50}, 0.005),
                          Entropy(2, Interval{1e-4, 50}), Entropy(4, Interval{1e-4, 50}),
                          Hinge(0.3, 6, Interval{-50, 50}, 0.005)});
  const Reference r = SolveConsensusScalar(p);
  double best = kInf;
  for (double z = 1e-4; z <= 10; z += 1e-4) {
    best = std::min(best, PrimalCost(p, Vector::Constant(4, z)));
  }
  CHECK(r.f_star <= best + 1e-12);
  CHECK(r.f_star >= best - 1e-6);
}

TEST_CASE("disconnected or empty-box consensus is rejected") {
  const ProblemInstance split = ProblemInstance::Consensus(
      Topology::Build(2, {}), {Quadratic(1, 0), Quadratic(1, 1)});
  CHECK_THROWS_AS(SolveConsensusScalar(split), Error);
  const ProblemInstance disjoint = ProblemInstance::Consensus(
      Topology::Path(2), {Quadratic(1, 0, Interval{0, 1}), Quadratic(1, 0, Interval{2, 3})});
  CHECK_THROWS_AS(SolveConsensusScalar(disjoint), Error);
}

TEST_CASE("tree dual optimum examples") {
  Vector path(2);
  path << -3, -3;
  CHECK((TreeQuadraticDualOptimum(PathQuadratic()) - path).norm() <= 1e-12);

  const ProblemInstance two =
      ProblemInstance::Consensus(Topology::Path(2), {Quadratic(1, 0), Quadratic(1, 2)});
  const Vector l2 = TreeQuadraticDualOptimum(two);
  CHECK(l2[0] == doctest::Approx(-1).epsilon(1e-14));

  const ProblemInstance star = ProblemInstance::Consensus(
      Topology::Star(4), {Quadratic(1, 0), Quadratic(1, 1), Quadratic(1, 2), Quadratic(1, 3)});
  const Vector ls = TreeQuadraticDualOptimum(star);
  const Supergradient g = ComputeSupergradient(star, ls);
  CHECK(g.g.norm() <= 1e-10);
  for (int i = 0; i < 4; ++i) CHECK(g.witness[i] == doctest::Approx(1.5).epsilon(1e-14));
  CHECK(ComputeReference(star).method == "golden_section+tree_elimination");
}

TEST_CASE("grid certificate") {
  const ProblemInstance p = PathQuadratic();
  Vector star(2), zero = Vector::Zero(2);
  star << -3, -3;
  CHECK(GridCertify(p, star, 1, 0.05));
  CHECK_FALSE(GridCertify(p, zero, 1, 0.05));
  const GridCertificate rep = GridCertifyReport(p, star, 1, 0.05);
  CHECK(rep.points == 41 * 41);
  const ProblemInstance single =
      ProblemInstance::Consensus(Topology::Build(1, {}), {Quadratic(1, 0)});
  CHECK(GridCertify(single, Vector(0), 1, 0.05));
  CHECK_THROWS_AS(GridCertify(p, star, 1, 1e-4), Error);
}

TEST_CASE("serial and OpenMP grid sweeps agree") {
  const ProblemInstance p = PathQuadratic();
  Vector off(2);
  off << -2.5, -3.2;
  const GridCertificate a = GridCertifyReport(p, off, 1, 0.05);
  const GridCertificate b = GridCertifyReportSerial(p, off, 1, 0.05);
  CHECK_FALSE(a.certified);
  CHECK(a.best_value == b.best_value);
  CHECK(a.best_index == b.best_index);
}
