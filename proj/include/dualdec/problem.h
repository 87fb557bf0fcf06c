#ifndef DUALDEC_PROBLEM_H_
#define DUALDEC_PROBLEM_H_

#include <limits>
#include <span>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "dualdec/topology.h"

namespace dualdec {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = -kInf;
  double hi = kInf;

  bool Contains(double x) const { return x >= lo && x <= hi; }
  double Clamp(double x) const { return x < lo ? lo : (x > hi ? hi : x); }
  bool Bounded() const { return lo > -kInf && hi < kInf; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

// Scalar convex cost atoms. Each acts on one coordinate of the agent's
// variable.

// (weight/2) (x - center)^2
struct QuadraticAtom {
  int coord = 0;
  double weight = 1;
  double center = 0;
  friend bool operator==(const QuadraticAtom&, const QuadraticAtom&) = default;
};

// max{-slope (x - knee) + offset, offset}
struct HingeAtom {
  int coord = 0;
  double slope = 1;
  double knee = 0;
  double offset = 0;
  friend bool operator==(const HingeAtom&, const HingeAtom&) = default;
};

// x log(scale x), x > 0
struct EntropyAtom {
  int coord = 0;
  double scale = 1;
  friend bool operator==(const EntropyAtom&, const EntropyAtom&) = default;
};

// coef x
struct LinearAtom {
  int coord = 0;
  double coef = 0;
  friend bool operator==(const LinearAtom&, const LinearAtom&) = default;
};

using CostAtom = std::variant<QuadraticAtom, HingeAtom, EntropyAtom, LinearAtom>;

int AtomCoord(const CostAtom& atom);
double AtomValue(const CostAtom& atom, double x);
double AtomRightDerivative(const CostAtom& atom, double x);
double AtomLeftDerivative(const CostAtom& atom, double x);
// Kink location for piecewise atoms, NaN otherwise.
double AtomKink(const CostAtom& atom);

// F_i(x) = sum of atoms + regularizer |x|^2 over the box X_i.
struct LocalProblem {
  int dim = 1;
  std::vector<Interval> box;  // one interval per coordinate
  std::vector<CostAtom> atoms;
  double regularizer = 0;

  // Throws when an atom parameter breaks convexity, an atom targets a missing
  // coordinate, or an entropy coordinate is not bounded away from zero.
  void Validate() const;
  // Cost F_i(x); x must lie in the box (and in the entropy domain).
  double Cost(std::span<const double> x) const;
  bool InBox(std::span<const double> x) const;
  std::vector<CostAtom> AtomsOn(int coord) const;

  friend bool operator==(const LocalProblem&, const LocalProblem&) = default;
};

// Selection matrices of one oriented edge (i, j): `first` = E_ij applied to
// x_i, `second` = E_ji applied to x_j. Both have the edge's dual dimension as
// row count.
struct EdgeCoupling {
  Matrix first;
  Matrix second;
  int dim() const { return static_cast<int>(first.rows()); }
};

class LocalOracle;

// Primal problem: min sum_i F_i(x_i) s.t. E_ij x_i = E_ji x_j on every edge.
// Immutable after construction.
class ProblemInstance {
 public:
  ProblemInstance(Topology topology, std::vector<LocalProblem> locals,
                  std::vector<EdgeCoupling> couplings);
  // Scalar agents sharing one coordinate; every selection matrix is [1].
  static ProblemInstance Consensus(Topology topology,
                                   std::vector<LocalProblem> locals);

  ProblemInstance(const ProblemInstance&);
  ProblemInstance(ProblemInstance&&) noexcept;
  ProblemInstance& operator=(const ProblemInstance&) = delete;
  ~ProblemInstance();

  const Topology& topology() const { return topology_; }
  int num_agents() const { return topology_.num_agents(); }
  int num_edges() const { return topology_.num_edges(); }
  const LocalProblem& local(int agent) const { return locals_[agent]; }
  const std::vector<LocalProblem>& locals() const { return locals_; }
  const EdgeCoupling& coupling(int edge) const { return couplings_[edge]; }
  const LocalOracle& oracle(int agent) const;

  int primal_dim() const { return x_offsets_.back(); }
  int dual_dim() const { return lambda_offsets_.back(); }
  int agent_dim(int agent) const { return locals_[agent].dim; }
  int edge_dim(int edge) const { return couplings_[edge].dim(); }
  int x_offset(int agent) const { return x_offsets_[agent]; }
  int lambda_offset(int edge) const { return lambda_offsets_[edge]; }

  // Every agent scalar and every selection matrix equal to [1].
  bool IsScalarConsensus() const { return scalar_consensus_; }

 private:
  Topology topology_;
  std::vector<LocalProblem> locals_;
  std::vector<EdgeCoupling> couplings_;
  std::vector<LocalOracle> oracles_;
  std::vector<int> x_offsets_;
  std::vector<int> lambda_offsets_;
  bool scalar_consensus_ = false;
};

// c_i with l_i(x_i, lambda) = F_i(x_i) + <c_i, x_i>.
Vector LocalLinearCoefficient(const ProblemInstance& problem, int agent,
                              const Vector& lambda);
// Writes c for every agent into `out` (size primal_dim).
void LinearCoefficients(const ProblemInstance& problem,
                        std::span<const double> lambda, std::span<double> out);

// E(x): blocks E_ij x_i - E_ji x_j stacked in edge order.
Vector ConstraintResidual(const ProblemInstance& problem, const Vector& x);
void ConstraintResidualInto(const ProblemInstance& problem,
                            std::span<const double> x, std::span<double> out);

double PrimalCost(const ProblemInstance& problem, const Vector& x);

// L(x, lambda) = F(x) + <lambda, E(x)>. Throws when x leaves the box.
double EvaluateLagrangian(const ProblemInstance& problem, const Vector& x,
                          const Vector& lambda);

struct DualValue {
  double value = 0;  // Q(lambda)
  Vector witness;    // x*_lambda, agent blocks concatenated
  bool tie_broken = false;
};

enum class Execution { kSerial, kParallel };

// Evaluates Q(lambda) = sum_i min_{x_i in X_i} l_i(x_i, lambda) with reusable
// buffers. In parallel mode the local problems are solved concurrently
// (OpenMP, only when the agent count makes it worthwhile) and the sum is
// reduced in agent order afterwards, so both modes agree bitwise.
class DualEvaluator {
 public:
  explicit DualEvaluator(const ProblemInstance& problem,
                         Execution execution = Execution::kParallel);
  // Throws OracleFailure naming the lowest failing agent.
  const DualValue& Evaluate(const Vector& lambda);
  const ProblemInstance& problem() const { return *problem_; }

  // Agent count at which the parallel mode actually forks.
  static constexpr int kParallelMinAgents = 64;

 private:
  const ProblemInstance* problem_;
  Execution execution_;
  std::vector<double> coeffs_;
  std::vector<double> values_;
  std::vector<char> ties_;
  std::vector<char> failed_;
  DualValue result_;
};

DualValue EvaluateDual(const ProblemInstance& problem, const Vector& lambda);
DualValue EvaluateDualSerial(const ProblemInstance& problem,
                             const Vector& lambda);

struct RankReport {
  bool full_rank = true;
  int rank = 0;
  int dual_dim = 0;
};

// Numerical row rank of the stacked constraint matrix H (Hx = 0), with
// singular values below 1e-10 * sigma_max treated as zero.
RankReport CheckConstraintRank(const ProblemInstance& problem);
Matrix ConstraintMatrix(const ProblemInstance& problem);

}  // namespace dualdec

#endif  // DUALDEC_PROBLEM_H_
