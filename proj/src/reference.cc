#include "dualdec/reference.h"

#include <cmath>
#include <string>

#include "dualdec/errors.h"

namespace dualdec {

namespace {

struct ScalarSum {
  const ProblemInstance* problem;

  double Value(double z) const {
    double v = 0;
    for (const LocalProblem& l : problem->locals()) {
      v += l.Cost(std::span<const double>(&z, 1));
    }
    return v;
  }
  double RightDerivative(double z) const {
    double d = 0;
    for (const LocalProblem& l : problem->locals()) {
      d += 2 * l.regularizer * z;
      for (const CostAtom& a : l.atoms) d += AtomRightDerivative(a, z);
    }
    return d;
  }
};

void RequireConsensus(const ProblemInstance& problem) {
  Require(problem.IsScalarConsensus(),
          "reference needs a scalar consensus problem (identity selections)");
  Require(problem.topology().IsConnected(),
          "consensus reformulation needs a connected graph");
}

}  // namespace

Reference SolveConsensusScalar(const ProblemInstance& problem) {
  RequireConsensus(problem);
  Interval box;
  for (const LocalProblem& l : problem.locals()) {
    box.lo = std::max(box.lo, l.box[0].lo);
    box.hi = std::min(box.hi, l.box[0].hi);
  }
  Require(box.lo <= box.hi, "box intersection is empty");

  const ScalarSum f{&problem};
  double a = box.lo, b = box.hi;
  // Bracket unbounded sides by doubling on the derivative sign.
  if (a == -kInf) {
    double probe = std::min(-1.0, b);
    while (f.RightDerivative(probe) > 0) {
      probe *= 2;
      if (probe < -0x1.0p60) Fail(ErrorKind::kOracleFailure, "sum unbounded below");
    }
    a = probe;
  }
  if (b == kInf) {
    double probe = std::max(1.0, a);
    while (f.RightDerivative(probe) < 0) {
      probe = 2 * probe + 1;
      if (probe > 0x1.0p60) Fail(ErrorKind::kOracleFailure, "sum unbounded below");
    }
    b = probe;
  }

  const double inv_phi = (std::sqrt(5.0) - 1) / 2;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f.Value(c), fd = f.Value(d);
  for (int it = 0; it < 400 && b - a > 1e-12; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f.Value(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f.Value(d);
    }
  }
  // The box ends are candidates too (the search never evaluates them).
  double z = 0.5 * (a + b);
  double best = f.Value(z);
  for (double cand : {a, box.lo, box.hi}) {
    if (std::isfinite(cand)) {
      const double v = f.Value(cand);
      if (v < best || (v == best && cand < z)) {
        best = v;
        z = cand;
      }
    }
  }

  Reference ref;
  ref.f_star = best;
  ref.q_star = best;
  ref.x_star = Vector::Constant(problem.num_agents(), z);
  ref.method = "golden_section";
  return ref;
}

bool IsTreeQuadratic(const ProblemInstance& problem) {
  if (!problem.IsScalarConsensus() || !problem.topology().IsTree()) {
    return false;
  }
  for (const LocalProblem& l : problem.locals()) {
    bool has_quadratic = false;
    for (const CostAtom& a : l.atoms) {
      if (!std::holds_alternative<QuadraticAtom>(a)) return false;
      has_quadratic = true;
    }
    if (!has_quadratic) return false;
  }
  return true;
}

Vector TreeQuadraticDualOptimum(const ProblemInstance& problem) {
  Require(problem.IsScalarConsensus(),
          "tree reference needs a scalar consensus problem");
  const Topology& topo = problem.topology();
  Require(topo.IsTree(), "tree reference needs a tree (cycle or disconnected)");
  const int n = problem.num_agents();

  std::vector<double> big_w(n), wa(n);
  double sum_w = 0, sum_wa = 0;
  for (int i = 0; i < n; ++i) {
    const LocalProblem& l = problem.local(i);
    double w = 0, s = 0;
    for (const CostAtom& a : l.atoms) {
      const auto* q = std::get_if<QuadraticAtom>(&a);
      Require(q != nullptr, "tree reference needs quadratic costs only");
      w += q->weight;
      s += q->weight * q->center;
    }
    Require(w > 0, "tree reference needs a quadratic term on every agent");
    big_w[i] = w + 2 * l.regularizer;
    wa[i] = s;
    sum_w += big_w[i];
    sum_wa += s;
  }
  const double z = sum_wa / sum_w;
  for (int i = 0; i < n; ++i) {
    const Interval& box = problem.local(i).box[0];
    Require(box.lo < z && z < box.hi,
            "box of agent " + std::to_string(i + 1) + " is active at z*");
  }

  // r_i: part of c_i = W_i abar_i - W_i z* not yet explained by solved edges.
  std::vector<double> r(n);
  for (int i = 0; i < n; ++i) r[i] = wa[i] - big_w[i] * z;
  std::vector<int> degree(n);
  for (int i = 0; i < n; ++i) {
    degree[i] = static_cast<int>(topo.IncidentEdges(i).size());
  }
  std::vector<char> solved(topo.num_edges(), 0);
  Vector lambda = Vector::Zero(topo.num_edges());
  std::vector<int> leaves;
  for (int i = 0; i < n; ++i) {
    if (degree[i] == 1) leaves.push_back(i);
  }
  // Ascending agent order, stack-based; any elimination order gives the same
  // (unique) solution on a tree.
  while (!leaves.empty()) {
    const int i = leaves.back();
    leaves.pop_back();
    if (degree[i] != 1) continue;
    int e = -1;
    for (int cand : topo.IncidentEdges(i)) {
      if (!solved[cand]) e = cand;
    }
    const Edge& edge = topo.edge(e);
    const int j = edge.first == i ? edge.second : edge.first;
    // c_i gets +lambda_e if i owns e, -lambda_e otherwise.
    lambda[e] = edge.first == i ? r[i] : -r[i];
    r[i] = 0;
    if (edge.first == j) {
      r[j] -= lambda[e];
    } else {
      r[j] += lambda[e];
    }
    solved[e] = 1;
    --degree[i];
    if (--degree[j] == 1) leaves.push_back(j);
  }
  return lambda;
}

Reference ComputeReference(const ProblemInstance& problem) {
  Reference ref = SolveConsensusScalar(problem);
  if (IsTreeQuadratic(problem)) {
    ref.lambda_star = TreeQuadraticDualOptimum(problem);
    ref.method = "golden_section+tree_elimination";
  }
  return ref;
}

namespace {

struct Grid {
  int side = 1;
  int64_t points = 1;
  double step = 0;
  int half = 0;
};

Grid MakeGrid(int dims, double radius, double step) {
  Require(radius >= 0 && step > 0, "grid needs radius >= 0 and step > 0");
  Grid g;
  g.step = step;
  g.half = static_cast<int>(std::floor(radius / step + 1e-9));
  g.side = 2 * g.half + 1;
  for (int d = 0; d < dims; ++d) {
    g.points *= g.side;
    if (g.points > kMaxGridPoints) {
      Fail(ErrorKind::kInvalidArgument,
           "grid too large (> 1e7 points); reduce radius or dimension");
    }
  }
  return g;
}

void GridPoint(const Grid& g, const Vector& center, int64_t index,
               Vector& out) {
  for (Eigen::Index d = 0; d < center.size(); ++d) {
    const int offset = static_cast<int>(index % g.side) - g.half;
    index /= g.side;
    out[d] = center[d] + offset * g.step;
  }
}

GridCertificate Finish(GridCertificate c) {
  c.certified = c.candidate_value >= c.best_value - 1e-9;
  return c;
}

}  // namespace

GridCertificate GridCertifyReportSerial(const ProblemInstance& problem,
                                        const Vector& candidate, double radius,
                                        double step) {
  RequireDims(candidate.size() == problem.dual_dim(),
              "candidate dimension mismatch");
  const Grid g = MakeGrid(problem.dual_dim(), radius, step);
  DualEvaluator eval(problem, Execution::kSerial);
  GridCertificate c;
  c.points = g.points;
  c.candidate_value = eval.Evaluate(candidate).value;
  c.best_value = -kInf;
  Vector p(candidate.size());
  for (int64_t idx = 0; idx < g.points; ++idx) {
    GridPoint(g, candidate, idx, p);
    const double v = eval.Evaluate(p).value;
    if (v > c.best_value) {
      c.best_value = v;
      c.best_index = idx;
    }
  }
  return Finish(c);
}

GridCertificate GridCertifyReport(const ProblemInstance& problem,
                                  const Vector& candidate, double radius,
                                  double step) {
  RequireDims(candidate.size() == problem.dual_dim(),
              "candidate dimension mismatch");
  const Grid g = MakeGrid(problem.dual_dim(), radius, step);
  GridCertificate c;
  c.points = g.points;
  c.candidate_value = EvaluateDualSerial(problem, candidate).value;
  double best = -kInf;
  int64_t best_index = -1;
#pragma omp parallel
  {
    DualEvaluator eval(problem, Execution::kSerial);
    Vector p(candidate.size());
    double local_best = -kInf;
    int64_t local_index = -1;
#pragma omp for schedule(static) nowait
    for (int64_t idx = 0; idx < g.points; ++idx) {
      GridPoint(g, candidate, idx, p);
      const double v = eval.Evaluate(p).value;
      if (v > local_best) {
        local_best = v;
        local_index = idx;
      }
    }
#pragma omp critical
    {
      if (local_index >= 0 &&
          (local_best > best ||
           (local_best == best && local_index < best_index))) {
        best = local_best;
        best_index = local_index;
      }
    }
  }
  c.best_value = best;
  c.best_index = best_index;
  return Finish(c);
}

bool GridCertify(const ProblemInstance& problem, const Vector& candidate,
                 double radius, double step) {
  return GridCertifyReport(problem, candidate, radius, step).certified;
}

}  // namespace dualdec
