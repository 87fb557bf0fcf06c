// Serial vs OpenMP kernels: dual evaluation over many agents and the grid
// certificate sweep.

#include <benchmark/benchmark.h>

#include "dualdec/experiment.h"
#include "dualdec/reference.h"

namespace {

using namespace dualdec;

ProblemInstance NumericalExampleProblem(int agents) {
  const ExperimentSpec spec = GenerateNumericalExample(agents / 10, agents - agents / 10,
                                                  "path", 7);
  return BuildProblem(BuildTopology(spec.graph), spec.problem);
}

void BM_EvaluateDual(benchmark::State& state, Execution exec) {
  const ProblemInstance p = NumericalExampleProblem(static_cast<int>(state.range(0)));
  DualEvaluator eval(p, exec);
  Vector lambda = Vector::LinSpaced(p.dual_dim(), -1.0, 1.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval.Evaluate(lambda).value);
  }
  state.SetItemsProcessed(state.iterations() * p.num_agents());
}

ProblemInstance PathQuadratic(int agents) {
  std::vector<LocalProblem> locals;
  for (int i = 0; i < agents; ++i) {
    LocalProblem l;
    l.box = {Interval{}};
    l.atoms = {QuadraticAtom{0, 1.0, 3.0 * i}};
    locals.push_back(l);
  }
  return ProblemInstance::Consensus(Topology::Path(agents), locals);
}

void BM_GridCertify(benchmark::State& state, bool parallel) {
  const ProblemInstance p = PathQuadratic(static_cast<int>(state.range(0)));
  const Vector lambda_star = TreeQuadraticDualOptimum(p);
  for (auto _ : state) {
    const GridCertificate c = parallel ? GridCertifyReport(p, lambda_star, 1.0, 0.05)
                                       : GridCertifyReportSerial(p, lambda_star, 1.0, 0.05);
    benchmark::DoNotOptimize(c.best_value);
  }
}

BENCHMARK_CAPTURE(BM_EvaluateDual, serial, Execution::kSerial)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK_CAPTURE(BM_EvaluateDual, openmp, Execution::kParallel)->Arg(64)->Arg(1024)->Arg(16384);
BENCHMARK_CAPTURE(BM_GridCertify, serial, false)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GridCertify, openmp, true)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
