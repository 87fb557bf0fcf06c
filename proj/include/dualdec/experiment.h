#ifndef DUALDEC_EXPERIMENT_H_
#define DUALDEC_EXPERIMENT_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dualdec/config.h"
#include "dualdec/monitor.h"
#include "dualdec/runtime.h"

namespace dualdec {

// Exit codes shared by the CLI and RunExperiment.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitViolation = 3;
inline constexpr int kExitOracle = 4;

Topology BuildTopology(const GraphSpec& graph);
ProblemInstance BuildProblem(const Topology& topology, const ProblemSpec& spec);

struct ExperimentOptions {
  std::optional<std::string> out_dir;
  bool allow_violations = false;
  std::optional<uint64_t> seed;
  std::optional<int64_t> iterations;
  std::optional<std::vector<std::string>> channels;
  std::ostream* log = nullptr;
};

// Run configuration of one variant (nullptr: the base config), reference
// included when spec.reference is set and the problem admits one.
RunConfig BuildRunConfig(const ExperimentSpec& spec, const VariantSpec* variant,
                         const ExperimentOptions& options = {});

struct VariantOutcome {
  std::string name;
  RunConfig config;
  RunResult result;
  MonitorReport report;
  std::optional<RateEstimate> rate;
  std::vector<std::string> notes;  // setup observations (rank, box)
};

struct ExperimentOutcome {
  int exit_code = kExitOk;
  std::vector<VariantOutcome> variants;
  std::vector<std::string> files;
  std::string output_dir;
};

// For each variant: reference, run, monitor, <name>.trace.csv and
// <name>.summary.json; then gap_vs_iter.csv over all variants. exit_code is
// kExitViolation when a monitor flagged a violated assumption and
// allow_violations is off. Config problems throw Error(kConfig), oracle
// failures throw OracleFailure.
ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const ExperimentOptions& options = {});

// Numerical-example instance: num_hinge hinge agents then num_entropy
// entropy agents, on a path or a connected random geometric graph, with the
// adaptive counter schedule and three variants (sync, async-global,
// async-local).
ExperimentSpec GenerateNumericalExample(int num_hinge, int num_entropy,
                                   const std::string& graph_kind, uint64_t seed,
                                   bool regularize = true);

// Reference + grid certificate of lambda* (when analytic). Writes a JSON
// report; returns kExitOk when certified or when no lambda* exists.
int CertifyExperiment(const ExperimentSpec& spec, std::ostream& out);

// Resolution order: explicit option, spec output dir, DUALDEC_OUT_DIR, "out".
std::string ResolveOutputDir(const ExperimentSpec& spec,
                             const ExperimentOptions& options);

std::string SummaryJson(const VariantOutcome& outcome);

}  // namespace dualdec

#endif  // DUALDEC_EXPERIMENT_H_
