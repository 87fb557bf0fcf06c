#include "dualdec/problem.h"

#include <cmath>
#include <string>

#include "dualdec/errors.h"
#include "dualdec/oracles.h"

namespace dualdec {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

int AtomCoord(const CostAtom& atom) {
  return std::visit([](const auto& a) { return a.coord; }, atom);
}

double AtomValue(const CostAtom& atom, double x) {
  return std::visit(
      Overloaded{
          [x](const QuadraticAtom& a) {
            const double d = x - a.center;
            return 0.5 * a.weight * d * d;
          },
          [x](const HingeAtom& a) {
            return std::max(-a.slope * (x - a.knee) + a.offset, a.offset);
          },
          [x](const EntropyAtom& a) { return x * std::log(a.scale * x); },
          [x](const LinearAtom& a) { return a.coef * x; },
      },
      atom);
}

double AtomRightDerivative(const CostAtom& atom, double x) {
  return std::visit(
      Overloaded{
          [x](const QuadraticAtom& a) { return a.weight * (x - a.center); },
          [x](const HingeAtom& a) { return x < a.knee ? -a.slope : 0.0; },
          [x](const EntropyAtom& a) { return std::log(a.scale * x) + 1; },
          [](const LinearAtom& a) { return a.coef; },
      },
      atom);
}

double AtomLeftDerivative(const CostAtom& atom, double x) {
  if (const auto* h = std::get_if<HingeAtom>(&atom)) {
    return x <= h->knee ? -h->slope : 0.0;
  }
  return AtomRightDerivative(atom, x);
}

double AtomKink(const CostAtom& atom) {
  if (const auto* h = std::get_if<HingeAtom>(&atom)) return h->knee;
  return std::nan("");
}

void LocalProblem::Validate() const {
  Require(dim >= 1, "agent variable dimension must be >= 1");
  Require(static_cast<int>(box.size()) == dim,
          "box needs one interval per coordinate");
  Require(regularizer >= 0, "regularizer weight must be >= 0");
  for (const Interval& b : box) {
    Require(b.lo <= b.hi && b.lo < kInf && b.hi > -kInf, "empty box interval");
  }
  for (const CostAtom& atom : atoms) {
    const int d = AtomCoord(atom);
    Require(d >= 0 && d < dim, "cost atom targets a missing coordinate");
    std::visit(Overloaded{
                   [](const QuadraticAtom& a) {
                     Require(a.weight > 0, "quadratic weight must be > 0");
                   },
                   [](const HingeAtom& a) {
                     Require(a.slope > 0, "hinge slope must be > 0");
                   },
                   [&](const EntropyAtom& a) {
                     Require(a.scale > 0, "entropy scale must be > 0");
                     Require(box[d].lo > 0,
                             "entropy coordinate needs a positive lower bound");
                   },
                   [](const LinearAtom&) {},
               },
               atom);
  }
}

bool LocalProblem::InBox(std::span<const double> x) const {
  for (int d = 0; d < dim; ++d) {
    if (!box[d].Contains(x[d])) return false;
  }
  return true;
}

double LocalProblem::Cost(std::span<const double> x) const {
  double v = 0;
  for (const CostAtom& atom : atoms) v += AtomValue(atom, x[AtomCoord(atom)]);
  for (int d = 0; d < dim; ++d) v += regularizer * x[d] * x[d];
  return v;
}

std::vector<CostAtom> LocalProblem::AtomsOn(int coord) const {
  std::vector<CostAtom> out;
  for (const CostAtom& atom : atoms) {
    if (AtomCoord(atom) == coord) out.push_back(atom);
  }
  return out;
}

ProblemInstance::ProblemInstance(Topology topology,
                                 std::vector<LocalProblem> locals,
                                 std::vector<EdgeCoupling> couplings)
    : topology_(std::move(topology)),
      locals_(std::move(locals)),
      couplings_(std::move(couplings)) {
  Require(static_cast<int>(locals_.size()) == topology_.num_agents(),
          "need one local problem per agent");
  Require(static_cast<int>(couplings_.size()) == topology_.num_edges(),
          "need one coupling per edge");
  x_offsets_.push_back(0);
  for (const LocalProblem& local : locals_) {
    local.Validate();
    x_offsets_.push_back(x_offsets_.back() + local.dim);
  }
  lambda_offsets_.push_back(0);
  scalar_consensus_ = true;
  for (int e = 0; e < num_edges(); ++e) {
    const EdgeCoupling& c = couplings_[e];
    const Edge& edge = topology_.edge(e);
    const std::string name = "edge (" + std::to_string(edge.first + 1) + ", " +
                             std::to_string(edge.second + 1) + ")";
    Require(c.first.rows() >= 1, name + ": dual dimension must be >= 1");
    Require(c.first.rows() == c.second.rows(),
            name + ": selection matrices disagree on row count");
    Require(c.first.cols() == locals_[edge.first].dim &&
                c.second.cols() == locals_[edge.second].dim,
            name + ": selection matrix columns must match agent dimensions");
    lambda_offsets_.push_back(lambda_offsets_.back() + c.dim());
    if (!(c.first.size() == 1 && c.second.size() == 1 && c.first(0, 0) == 1 &&
          c.second(0, 0) == 1)) {
      scalar_consensus_ = false;
    }
  }
  for (const LocalProblem& local : locals_) {
    if (local.dim != 1) scalar_consensus_ = false;
  }
  oracles_.reserve(locals_.size());
  for (const LocalProblem& local : locals_) oracles_.emplace_back(local);
}

ProblemInstance::ProblemInstance(const ProblemInstance&) = default;
ProblemInstance::ProblemInstance(ProblemInstance&&) noexcept = default;
ProblemInstance::~ProblemInstance() = default;

const LocalOracle& ProblemInstance::oracle(int agent) const {
  return oracles_[agent];
}

ProblemInstance ProblemInstance::Consensus(Topology topology,
                                           std::vector<LocalProblem> locals) {
  std::vector<EdgeCoupling> couplings(
      topology.num_edges(),
      EdgeCoupling{Matrix::Ones(1, 1), Matrix::Ones(1, 1)});
  return ProblemInstance(std::move(topology), std::move(locals),
                         std::move(couplings));
}

void LinearCoefficients(const ProblemInstance& problem,
                        std::span<const double> lambda,
                        std::span<double> out) {
  RequireDims(static_cast<int>(lambda.size()) == problem.dual_dim(),
              "dual vector dimension mismatch");
  RequireDims(static_cast<int>(out.size()) == problem.primal_dim(),
              "coefficient buffer dimension mismatch");
  std::fill(out.begin(), out.end(), 0.0);
  const auto& edges = problem.topology().edges();
  for (int e = 0; e < problem.num_edges(); ++e) {
    const EdgeCoupling& c = problem.coupling(e);
    const int lo = problem.lambda_offset(e);
    const int xi = problem.x_offset(edges[e].first);
    const int xj = problem.x_offset(edges[e].second);
    // owner gets +E_ij^T lambda, the other endpoint -E_ji^T lambda
    for (int r = 0; r < c.dim(); ++r) {
      const double l = lambda[lo + r];
      for (int col = 0; col < c.first.cols(); ++col) {
        out[xi + col] += c.first(r, col) * l;
      }
      for (int col = 0; col < c.second.cols(); ++col) {
        out[xj + col] -= c.second(r, col) * l;
      }
    }
  }
}

Vector LocalLinearCoefficient(const ProblemInstance& problem, int agent,
                              const Vector& lambda) {
  Require(agent >= 0 && agent < problem.num_agents(), "agent out of range");
  RequireDims(lambda.size() == problem.dual_dim(),
              "dual vector dimension mismatch");
  Vector c = Vector::Zero(problem.agent_dim(agent));
  const auto& edges = problem.topology().edges();
  for (int e : problem.topology().IncidentEdges(agent)) {
    const EdgeCoupling& cp = problem.coupling(e);
    const auto block = lambda.segment(problem.lambda_offset(e), cp.dim());
    if (edges[e].first == agent) {
      c += cp.first.transpose() * block;
    } else {
      c -= cp.second.transpose() * block;
    }
  }
  return c;
}

void ConstraintResidualInto(const ProblemInstance& problem,
                            std::span<const double> x, std::span<double> out) {
  RequireDims(static_cast<int>(x.size()) == problem.primal_dim(),
              "primal vector dimension mismatch");
  RequireDims(static_cast<int>(out.size()) == problem.dual_dim(),
              "residual buffer dimension mismatch");
  const auto& edges = problem.topology().edges();
  for (int e = 0; e < problem.num_edges(); ++e) {
    const EdgeCoupling& c = problem.coupling(e);
    const int lo = problem.lambda_offset(e);
    const int xi = problem.x_offset(edges[e].first);
    const int xj = problem.x_offset(edges[e].second);
    for (int r = 0; r < c.dim(); ++r) {
      double a = 0, b = 0;
      for (int col = 0; col < c.first.cols(); ++col) {
        a += c.first(r, col) * x[xi + col];
      }
      for (int col = 0; col < c.second.cols(); ++col) {
        b += c.second(r, col) * x[xj + col];
      }
      out[lo + r] = a - b;
    }
  }
}

Vector ConstraintResidual(const ProblemInstance& problem, const Vector& x) {
  Vector out(problem.dual_dim());
  ConstraintResidualInto(problem, std::span<const double>(x.data(), x.size()),
                         std::span<double>(out.data(), out.size()));
  return out;
}

double PrimalCost(const ProblemInstance& problem, const Vector& x) {
  RequireDims(x.size() == problem.primal_dim(),
              "primal vector dimension mismatch");
  double v = 0;
  for (int i = 0; i < problem.num_agents(); ++i) {
    v += problem.local(i).Cost(std::span<const double>(
        x.data() + problem.x_offset(i), problem.agent_dim(i)));
  }
  return v;
}

double EvaluateLagrangian(const ProblemInstance& problem, const Vector& x,
                          const Vector& lambda) {
  RequireDims(x.size() == problem.primal_dim(),
              "primal vector dimension mismatch");
  RequireDims(lambda.size() == problem.dual_dim(),
              "dual vector dimension mismatch");
  for (int i = 0; i < problem.num_agents(); ++i) {
    if (!problem.local(i).InBox(std::span<const double>(
            x.data() + problem.x_offset(i), problem.agent_dim(i)))) {
      Fail(ErrorKind::kInvalidArgument,
           "x outside the box of agent " + std::to_string(i + 1));
    }
  }
  return PrimalCost(problem, x) + lambda.dot(ConstraintResidual(problem, x));
}

DualEvaluator::DualEvaluator(const ProblemInstance& problem,
                             Execution execution)
    : problem_(&problem),
      execution_(execution),
      coeffs_(problem.primal_dim()),
      values_(problem.num_agents()),
      ties_(problem.num_agents()),
      failed_(problem.num_agents()) {
  result_.witness.resize(problem.primal_dim());
}

const DualValue& DualEvaluator::Evaluate(const Vector& lambda) {
  const ProblemInstance& p = *problem_;
  LinearCoefficients(p, std::span<const double>(lambda.data(), lambda.size()),
                     coeffs_);
  const int n = p.num_agents();
  double* witness = result_.witness.data();

  auto solve_agent = [&](int i) {
    const int off = p.x_offset(i);
    const int dim = p.agent_dim(i);
    bool tie = false;
    values_[i] = p.oracle(i).SolveInto(
        std::span<const double>(coeffs_.data() + off, dim),
        std::span<double>(witness + off, dim), &tie);
    ties_[i] = tie;
  };

  if (execution_ == Execution::kParallel && n >= kParallelMinAgents) {
    std::fill(failed_.begin(), failed_.end(), 0);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
      try {
        solve_agent(i);
      } catch (...) {
        failed_[i] = 1;
      }
    }
    for (int i = 0; i < n; ++i) {
      // Re-run the first failure on this thread to surface its exception.
      if (failed_[i]) {
        try {
          solve_agent(i);
        } catch (OracleFailure& f) {
          throw OracleFailure(i, "agent " + std::to_string(i + 1) + ": " +
                                     f.what());
        }
      }
    }
  } else {
    for (int i = 0; i < n; ++i) {
      try {
        solve_agent(i);
      } catch (OracleFailure& f) {
        throw OracleFailure(i, "agent " + std::to_string(i + 1) + ": " +
                                   f.what());
      }
    }
  }

  double sum = 0;
  bool tie = false;
  for (int i = 0; i < n; ++i) {
    sum += values_[i];
    tie = tie || ties_[i];
  }
  result_.value = sum;
  result_.tie_broken = tie;
  return result_;
}

DualValue EvaluateDual(const ProblemInstance& problem, const Vector& lambda) {
  DualEvaluator eval(problem, Execution::kParallel);
  return eval.Evaluate(lambda);
}

DualValue EvaluateDualSerial(const ProblemInstance& problem,
                             const Vector& lambda) {
  DualEvaluator eval(problem, Execution::kSerial);
  return eval.Evaluate(lambda);
}

Matrix ConstraintMatrix(const ProblemInstance& problem) {
  Matrix h = Matrix::Zero(problem.dual_dim(), problem.primal_dim());
  const auto& edges = problem.topology().edges();
  for (int e = 0; e < problem.num_edges(); ++e) {
    const EdgeCoupling& c = problem.coupling(e);
    const int row = problem.lambda_offset(e);
    h.block(row, problem.x_offset(edges[e].first), c.dim(), c.first.cols()) =
        c.first;
    h.block(row, problem.x_offset(edges[e].second), c.dim(),
            c.second.cols()) = -c.second;
  }
  return h;
}

RankReport CheckConstraintRank(const ProblemInstance& problem) {
  RankReport report;
  report.dual_dim = problem.dual_dim();
  if (report.dual_dim == 0) return report;
  const Matrix h = ConstraintMatrix(problem);
  Eigen::BDCSVD<Matrix> svd(h);
  const Vector& s = svd.singularValues();
  const double tol = 1e-10 * (s.size() > 0 ? s(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) ++rank;
  }
  report.rank = rank;
  report.full_rank = rank == report.dual_dim;
  return report;
}

}  // namespace dualdec
