#ifndef DUALDEC_TESTS_FIXTURES_H_
#define DUALDEC_TESTS_FIXTURES_H_

#include <memory>
#include <vector>

#include "dualdec/problem.h"
#include "dualdec/random.h"

namespace dualdec::testing {

inline LocalProblem Quadratic(double weight, double center,
                              Interval box = Interval{}, double rho = 0) {
  LocalProblem l;
  l.box = {box};
  l.atoms = {QuadraticAtom{0, weight, center}};
  l.regularizer = rho;
  return l;
}

inline LocalProblem Hinge(double slope, double knee, Interval box,
                          double rho = 0) {
  LocalProblem l;
  l.box = {box};
  l.atoms = {HingeAtom{0, slope, knee, 0.0}};
  l.regularizer = rho;
  return l;
}

inline LocalProblem Entropy(double scale, Interval box) {
  LocalProblem l;
  l.box = {box};
  l.atoms = {EntropyAtom{0, scale}};
  return l;
}

// 3-node path, w = 1, a = (0, 3, 6): z* = 3, F* = 9, lambda* = (-3, -3).
inline ProblemInstance PathQuadratic(Interval box = Interval{}) {
  return ProblemInstance::Consensus(
      Topology::Path(3),
      {Quadratic(1, 0, box), Quadratic(1, 3, box), Quadratic(1, 6, box)});
}

inline std::shared_ptr<const ProblemInstance> Shared(ProblemInstance p) {
  return std::make_shared<const ProblemInstance>(std::move(p));
}

// Random tree on n agents (each agent i > 0 attaches to a uniform earlier one)
// with quadratic costs.
inline ProblemInstance RandomTreeQuadratic(int n, Rng& rng) {
  std::vector<AgentPair> pairs;
  for (int i = 1; i < n; ++i) {
    pairs.emplace_back(static_cast<int>(rng.Below(i)), i);
  }
  std::vector<LocalProblem> locals;
  for (int i = 0; i < n; ++i) {
    locals.push_back(Quadratic(rng.Uniform(0.5, 2.0), rng.Uniform(-5, 5)));
  }
  return ProblemInstance::Consensus(Topology::Build(n, pairs), locals);
}

// 3-agent problem with 2-dimensional agents coupled on one coordinate pair
// per edge, mixing families.
inline ProblemInstance MixedVectorProblem() {
  std::vector<LocalProblem> locals(3);
  for (auto& l : locals) {
    l.dim = 2;
    l.box = {Interval{-4, 4}, Interval{0.05, 5}};
  }
  locals[0].atoms = {QuadraticAtom{0, 1.0, 1.0}, EntropyAtom{1, 2.0}};
  locals[1].atoms = {HingeAtom{0, 0.8, 2.0, 0.0}, QuadraticAtom{1, 0.5, 1.0}};
  locals[1].regularizer = 0.01;
  locals[2].atoms = {QuadraticAtom{0, 2.0, -1.0}, HingeAtom{1, 1.0, 3.0, 0.5},
                     LinearAtom{1, 0.3}};
  Matrix sel01(1, 2), sel10(1, 2), sel12(2, 2), sel21(2, 2);
  sel01 << 1, 0;
  sel10 << 1, 0;
  sel12 << 1, 0, 0, 1;
  sel21 << 1, 0, 0, 1;
  return ProblemInstance(Topology::Path(3), locals,
                         {EdgeCoupling{sel01, sel10}, EdgeCoupling{sel12, sel21}});
}

}  // namespace dualdec::testing

#endif  // DUALDEC_TESTS_FIXTURES_H_
