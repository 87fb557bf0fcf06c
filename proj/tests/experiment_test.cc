#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dualdec/config.h"
#include "dualdec/errors.h"
#include "dualdec/experiment.h"

using namespace dualdec;
namespace fs = std::filesystem;

namespace {

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentSpec SmallPath() {
  ExperimentSpec s;
  s.name = "small";
  s.graph.kind = "path";
  s.graph.agents = 3;
  for (double a : {0.0, 3.0, 6.0}) {
    LocalProblem l;
    l.box = {Interval{-10, 16}};
    l.atoms = {QuadraticAtom{0, 1, a}};
    s.problem.agents.push_back(l);
  }
  s.run.iterations = 300;
  return s;
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("base config only when there are no variants") {
  TempDir dir("dualdec_exp_base");
  ExperimentOptions o;
  o.out_dir = dir.path.string();
  const ExperimentOutcome out = RunExperiment(SmallPath(), o);
  CHECK(out.exit_code == kExitOk);
  REQUIRE(out.variants.size() == 1);
  CHECK(fs::exists(dir.path / "small.trace.csv"));
  CHECK(fs::exists(dir.path / "small.summary.json"));
  CHECK(fs::exists(dir.path / "gap_vs_iter.csv"));
}

TEST_CASE("lambda and witness channels get their own files") {
  TempDir dir("dualdec_exp_channels");
  ExperimentOptions o;
  o.out_dir = dir.path.string();
  o.channels = std::vector<std::string>{"lambda", "witness"};
  ExperimentSpec s = SmallPath();
  s.output.stride = 100;
  RunExperiment(s, o);
  const std::string lambda = ReadFile(dir.path / "small.lambda.csv");
  CHECK(lambda.rfind("k,lambda_1,lambda_2\n0,0,0\n100,", 0) == 0);
  const std::string witness = ReadFile(dir.path / "small.witness.csv");
  CHECK(witness.rfind("k,x_1,x_2,x_3\n0,0,3,6\n", 0) == 0);
}

TEST_CASE("constant stepsize flags a violation and exits nonzero") {
  TempDir dir("dualdec_exp_const");
  ExperimentSpec s = SmallPath();
  s.stepsize.rules = {ConstantStep{0.1}};
  ExperimentOptions o;
  o.out_dir = dir.path.string();
  const ExperimentOutcome out = RunExperiment(s, o);
  CHECK(out.exit_code == kExitViolation);
  CHECK(ReadFile(dir.path / "small.summary.json").find("Assumption 3 violated") !=
        std::string::npos);
  o.allow_violations = true;
  CHECK(RunExperiment(s, o).exit_code == kExitOk);
}

TEST_CASE("artifacts are byte-identical across repeated runs") {
  TempDir a("dualdec_exp_det_a"), b("dualdec_exp_det_b");
  ExperimentSpec s = GenerateNumericalExample(1, 3, "path", 5);
  s.run.iterations = 2000;
  ExperimentOptions oa, ob;
  oa.out_dir = a.path.string();
  ob.out_dir = b.path.string();
  const ExperimentOutcome ra = RunExperiment(s, oa);
  RunExperiment(s, ob);
  // 3 variants x (trace, summary, witness) + gap file
  CHECK(ra.files.size() == 10);
  for (const auto& f : fs::directory_iterator(a.path)) {
    CHECK(ReadFile(f.path()) == ReadFile(b.path / f.path().filename()));
  }
}

TEST_CASE("generated numerical-example instances") {
  const ExperimentSpec big = GenerateNumericalExample(5, 45, "path", 1);
  CHECK(big.graph.agents == 50);
  CHECK(big.problem.agents.size() == 50);
  CHECK(std::holds_alternative<HingeAtom>(big.problem.agents[4].atoms[0]));
  CHECK(std::holds_alternative<EntropyAtom>(big.problem.agents[5].atoms[0]));
  CHECK(big.variants.size() == 3);
  CHECK(ParseExperiment(SerializeExperiment(big)) == big);

  const ExperimentSpec one = GenerateNumericalExample(0, 1, "path", 1);
  const ProblemInstance p = BuildProblem(BuildTopology(one.graph), one.problem);
  CHECK(p.dual_dim() == 0);

  const ExperimentSpec rgg = GenerateNumericalExample(5, 45, "rgg", 3);
  const Topology t = BuildTopology(rgg.graph);
  CHECK(t.IsConnected());
  CHECK(t.num_edges() >= 358);
}

TEST_CASE("certify reports the tree dual optimum") {
  std::ostringstream out;
  CHECK(CertifyExperiment(SmallPath(), out) == kExitOk);
  CHECK(out.str().find("\"certified\": true") != std::string::npos);
}

TEST_CASE("output directory resolution") {
  ExperimentSpec s = SmallPath();
  ExperimentOptions o;
  o.out_dir = "explicit";
  s.output.dir = "from_spec";
  CHECK(ResolveOutputDir(s, o) == "explicit");
  o.out_dir.reset();
  CHECK(ResolveOutputDir(s, o) == "from_spec");
}
