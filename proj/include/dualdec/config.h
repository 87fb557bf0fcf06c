#ifndef DUALDEC_CONFIG_H_
#define DUALDEC_CONFIG_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualdec/dual_engine.h"
#include "dualdec/noise.h"
#include "dualdec/problem.h"
#include "dualdec/scheduler.h"
#include "dualdec/stepsize.h"

namespace dualdec {

// Plain-data experiment description mirroring the JSON document. Agents,
// edges and atom coordinates are 1-based in the document, 0-based here.

struct GraphSpec {
  std::string kind = "path";  // path | star | edges | rgg
  int agents = 1;
  std::vector<AgentPair> edges;  // kind == edges
  double radius = 0;             // rgg: explicit radius, or
  int target_edges = 0;          // rgg: pick the radius giving this count
  uint64_t seed = 0;             // rgg placement
  friend bool operator==(const GraphSpec&, const GraphSpec&) = default;
};

struct CouplingSpec {
  std::vector<std::vector<double>> first;   // rows of E_ij
  std::vector<std::vector<double>> second;  // rows of E_ji
  friend bool operator==(const CouplingSpec&, const CouplingSpec&) = default;
};

struct ProblemSpec {
  std::vector<LocalProblem> agents;
  // Empty: identity (consensus) selections on every edge.
  std::vector<CouplingSpec> couplings;
  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

struct StepsizeSpec {
  std::vector<StepsizeRule> rules = {PowerDecay{0.15, 0.51}};
  StepsizeClock clock = StepsizeClock::kLocal;
  friend bool operator==(const StepsizeSpec&, const StepsizeSpec&) = default;
};

struct RunSpec {
  int64_t iterations = 1000;
  uint64_t seed = 1;
  std::optional<std::vector<double>> lambda0;
  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct OutputSpec {
  std::string dir;  // empty: CLI flag / environment / "out"
  int64_t stride = 1;
  std::vector<std::string> channels = {"Q", "gap", "residual"};
  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct VariantSpec {
  std::string name;
  std::optional<GraphSpec> graph;
  std::optional<SchedulerSpec> scheduler;
  std::optional<StepsizeSpec> stepsize;
  std::optional<NoiseSpec> noise;
  friend bool operator==(const VariantSpec&, const VariantSpec&) = default;
};

struct ExperimentSpec {
  std::string name = "experiment";
  GraphSpec graph;
  ProblemSpec problem;
  SchedulerSpec scheduler = SynchronousSchedule{};
  StepsizeSpec stepsize;
  NoiseSpec noise = NoNoise{};
  RunSpec run;
  bool reference = true;
  OutputSpec output;
  std::vector<VariantSpec> variants;
  friend bool operator==(const ExperimentSpec&, const ExperimentSpec&) = default;
};

// Parse errors are Error(kConfig) naming the line (syntax) or the field path
// (schema), e.g. "/problem/agents/3/atoms/0/weight: expected a number".
ExperimentSpec ParseExperiment(const std::string& text);
ExperimentSpec LoadExperiment(const std::string& path);
std::string SerializeExperiment(const ExperimentSpec& spec);

// Invariants not expressible in the schema: unique variant names,
// stride >= 1, agent count matching the graph.
void ValidateExperiment(const ExperimentSpec& spec);

}  // namespace dualdec

#endif  // DUALDEC_CONFIG_H_
