#ifndef DUALDEC_SCHEDULER_H_
#define DUALDEC_SCHEDULER_H_

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dualdec/dual_engine.h"
#include "dualdec/random.h"
#include "dualdec/topology.h"

namespace dualdec {

struct SynchronousSchedule {
  friend bool operator==(const SynchronousSchedule&,
                         const SynchronousSchedule&) = default;
};

// Independent per-edge draws. A single entry applies to every edge.
struct IidBernoulliSchedule {
  std::vector<double> p;
  friend bool operator==(const IidBernoulliSchedule&,
                         const IidBernoulliSchedule&) = default;
};

// Exactly one edge per step: order[k mod |E|]. Empty order = 0, 1, 2, ...
struct CyclicSchedule {
  std::vector<int> order;
  friend bool operator==(const CyclicSchedule&,
                         const CyclicSchedule&) = default;
};

// Every edge fires at least once in any `window` consecutive steps. Edges at
// their deadline are forced; one other edge is drawn uniformly as filler.
struct PersistentlyExcitingSchedule {
  int window = 1;
  friend bool operator==(const PersistentlyExcitingSchedule&,
                         const PersistentlyExcitingSchedule&) = default;
};

// Edge (i, j) fires with probability p_i p_j decay^(c_i c_j), where c_i counts
// the steps among the previous `window` (current step excluded) in which some
// edge touching i was active. Needs global information: a simulation device,
// not a distributed protocol.
struct AdaptiveCounterSchedule {
  std::vector<double> base;  // per agent, in (0.5, 1) for the reference setup
  double decay = 0.7;
  int window = 10;
  friend bool operator==(const AdaptiveCounterSchedule&,
                         const AdaptiveCounterSchedule&) = default;
};

// Replays explicit masks; steps past the end are idle.
struct ScriptedSchedule {
  std::vector<Mask> rows;
  std::string source;  // file the rows came from, if any
  friend bool operator==(const ScriptedSchedule&,
                         const ScriptedSchedule&) = default;
};

using SchedulerSpec =
    std::variant<SynchronousSchedule, IidBernoulliSchedule, CyclicSchedule,
                 PersistentlyExcitingSchedule, AdaptiveCounterSchedule,
                 ScriptedSchedule>;

std::string SchedulerName(const SchedulerSpec& spec);

// Throws on malformed specs (probabilities outside (0, 1], order not a
// permutation, window < 1, wrong mask width).
void ValidateScheduler(const SchedulerSpec& spec, const Topology& topology);

// Per-edge activation probabilities when the schedule is i.i.d. in time
// (Synchronous, IidBernoulli); nullopt otherwise.
std::optional<std::vector<double>> IidProbabilities(const SchedulerSpec& spec,
                                                    int num_edges);

// Reads a 0/1 mask file: one row per step, one column per edge (whitespace
// or comma separated, '#' comments).
ScriptedSchedule LoadMaskFile(const std::string& path, int num_edges);

// Mask generator. Owns its random stream and the history needed by the
// adaptive and persistently exciting schedules; masks are produced for steps
// k = 0, 1, 2, ... in order.
class Scheduler {
 public:
  Scheduler(SchedulerSpec spec, const Topology& topology, uint64_t seed);
  Mask Next();
  int64_t step() const { return step_; }

 private:
  Mask NextAdaptive();
  Mask NextPersistent();

  SchedulerSpec spec_;
  const Topology* topology_;
  Rng rng_;
  int64_t step_ = 0;
  std::deque<Mask> history_;       // adaptive: last `window` masks
  std::vector<int64_t> last_fire_; // persistent: last activation step
};

// gamma_e[k] / k.
double EmpiricalRate(int64_t gamma, int64_t k);

}  // namespace dualdec

#endif  // DUALDEC_SCHEDULER_H_
