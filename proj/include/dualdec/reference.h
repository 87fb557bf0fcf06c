#ifndef DUALDEC_REFERENCE_H_
#define DUALDEC_REFERENCE_H_

#include <cstdint>
#include <optional>
#include <string>

#include "dualdec/problem.h"

namespace dualdec {

// Ground truth computed without running the dual method.
struct Reference {
  double f_star = 0;
  Vector x_star;
  std::optional<Vector> lambda_star;
  double q_star = 0;  // = f_star (strong duality)
  std::string method;
};

// Centralized min over a shared scalar z of sum_i F_i(z) on the intersection
// of the boxes. Golden-section search to a bracket of width 1e-12; equal
// values keep the left part, so flat minimizer sets resolve to their
// smallest point. Needs a connected scalar-consensus problem.
Reference SolveConsensusScalar(const ProblemInstance& problem);

// lambda* for quadratic consensus on a tree with interior optimum, by
// leaf-inward elimination of c_i(lambda) = W_i (abar_i - z*), where
// W_i = sum w + 2 rho and abar_i is the weighted center. Throws on cycles,
// non-quadratic costs, or a box active at z*.
Vector TreeQuadraticDualOptimum(const ProblemInstance& problem);

// Both oracles combined: F* from the scalar search, lambda* when the problem
// is tree-quadratic.
Reference ComputeReference(const ProblemInstance& problem);
bool IsTreeQuadratic(const ProblemInstance& problem);

struct GridCertificate {
  bool certified = true;
  int64_t points = 0;
  double candidate_value = 0;
  double best_value = 0;   // max of Q over the grid
  int64_t best_index = -1; // smallest linear index attaining it
};

// Q(candidate) >= Q(p) - 1e-9 for every p on the grid
// candidate + {-radius, ..., radius}^n (spacing `step`). Throws when the grid
// has more than 1e7 points.
GridCertificate GridCertifyReport(const ProblemInstance& problem,
                                  const Vector& candidate, double radius,
                                  double step);
GridCertificate GridCertifyReportSerial(const ProblemInstance& problem,
                                        const Vector& candidate, double radius,
                                        double step);
bool GridCertify(const ProblemInstance& problem, const Vector& candidate,
                 double radius, double step);

inline constexpr int64_t kMaxGridPoints = 10'000'000;

}  // namespace dualdec

#endif  // DUALDEC_REFERENCE_H_
