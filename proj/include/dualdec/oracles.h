#ifndef DUALDEC_ORACLES_H_
#define DUALDEC_ORACLES_H_

#include <span>
#include <vector>

#include "dualdec/problem.h"

namespace dualdec {

// Minimizers of l(x) = f(x) + rho x^2 + c x over an interval, one cost family
// at a time. All throw OracleFailure (agent -1) when no finite minimizer
// exists.
struct ScalarResult {
  double x = 0;
  double value = 0;
  bool tie_broken = false;
};

ScalarResult SolveQuadratic(double weight, double center, Interval box,
                            double c, double rho);
ScalarResult SolveHinge(double slope, double knee, double offset, Interval box,
                        double c, double rho);
ScalarResult SolveEntropy(double scale, Interval box, double c,
                          double rho = 0);
// Bisection on the sign of the right derivative, then a comparison of the
// bracket ends and any kinks inside the bracket. Works for any sum of convex
// atoms; infinite bounds are bracketed by doubling.
ScalarResult SolveScalarFallback(std::span<const CostAtom> atoms, double rho,
                                 Interval box, double c);

struct OracleResult {
  Vector x;
  double value = 0;
  bool tie_broken = false;
};

// Exact minimizer for one coordinate of a separable local cost. Picks the
// closed form when the coordinate carries a single family, otherwise the
// fallback.
class CoordinateOracle {
 public:
  CoordinateOracle(std::vector<CostAtom> atoms, double rho, Interval box);
  ScalarResult Solve(double c) const;

 private:
  enum class Kind { kLinear, kQuadratic, kHinge, kEntropy, kFallback };
  Kind kind_;
  std::vector<CostAtom> atoms_;
  double rho_;
  Interval box_;
  double linear_ = 0;  // folded LinearAtom coefficients
  // merged quadratic (weight, center) or the single hinge/entropy atom
  double p0_ = 0, p1_ = 0, p2_ = 0;
};

class LocalOracle {
 public:
  explicit LocalOracle(const LocalProblem& local);
  // Writes the minimizer into x (size dim) and returns the optimal value
  // l_i(x*) = F_i(x*) + <c, x*>.
  double SolveInto(std::span<const double> c, std::span<double> x,
                   bool* tie_broken) const;
  OracleResult Solve(const Vector& c) const;

 private:
  std::vector<CoordinateOracle> coords_;
};

// Convenience: builds the oracle for one LocalProblem and solves it.
OracleResult SolveLocal(const LocalProblem& local, const Vector& c);

}  // namespace dualdec

#endif  // DUALDEC_ORACLES_H_
