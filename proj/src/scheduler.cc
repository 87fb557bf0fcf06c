#include "dualdec/scheduler.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "dualdec/errors.h"

namespace dualdec {

std::string SchedulerName(const SchedulerSpec& spec) {
  switch (spec.index()) {
    case 0: return "synchronous";
    case 1: return "iid";
    case 2: return "cyclic";
    case 3: return "persistent";
    case 4: return "adaptive";
    default: return "scripted";
  }
}

void ValidateScheduler(const SchedulerSpec& spec, const Topology& topology) {
  const int m = topology.num_edges();
  if (const auto* s = std::get_if<IidBernoulliSchedule>(&spec)) {
    Require(s->p.size() == 1 || static_cast<int>(s->p.size()) == m,
            "iid scheduler needs one probability or one per edge");
    for (double p : s->p) {
      Require(p > 0 && p <= 1, "iid activation probability must be in (0, 1]");
    }
  } else if (const auto* s = std::get_if<CyclicSchedule>(&spec)) {
    if (!s->order.empty()) {
      std::vector<int> sorted = s->order;
      std::sort(sorted.begin(), sorted.end());
      bool perm = static_cast<int>(sorted.size()) == m;
      for (int i = 0; perm && i < m; ++i) perm = sorted[i] == i;
      Require(perm, "cyclic order must be a permutation of the edges");
    }
  } else if (const auto* s = std::get_if<PersistentlyExcitingSchedule>(&spec)) {
    Require(s->window >= 1, "persistent window must be >= 1");
  } else if (const auto* s = std::get_if<AdaptiveCounterSchedule>(&spec)) {
    Require(static_cast<int>(s->base.size()) == topology.num_agents(),
            "adaptive scheduler needs one base probability per agent");
    for (double p : s->base) {
      Require(p > 0 && p <= 1, "adaptive base probability must be in (0, 1]");
    }
    Require(s->decay > 0 && s->decay <= 1, "adaptive decay must be in (0, 1]");
    Require(s->window >= 0, "adaptive window must be >= 0");
  } else if (const auto* s = std::get_if<ScriptedSchedule>(&spec)) {
    for (const Mask& row : s->rows) {
      Require(static_cast<int>(row.size()) == m,
              "scripted mask row width must equal the edge count");
    }
  }
}

std::optional<std::vector<double>> IidProbabilities(const SchedulerSpec& spec,
                                                    int num_edges) {
  if (std::holds_alternative<SynchronousSchedule>(spec)) {
    return std::vector<double>(num_edges, 1.0);
  }
  if (const auto* s = std::get_if<IidBernoulliSchedule>(&spec)) {
    if (s->p.size() == 1) return std::vector<double>(num_edges, s->p[0]);
    return s->p;
  }
  return std::nullopt;
}

ScriptedSchedule LoadMaskFile(const std::string& path, int num_edges) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kConfig, "cannot open mask file " + path);
  ScriptedSchedule out;
  out.source = path;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) {
      line.resize(hash);
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    Mask row;
    int v;
    while (fields >> v) {
      if (v != 0 && v != 1) {
        Fail(ErrorKind::kConfig, path + ":" + std::to_string(line_no) +
                                     ": mask entries must be 0 or 1");
      }
      row.push_back(static_cast<uint8_t>(v));
    }
    if (!fields.eof()) {
      Fail(ErrorKind::kConfig,
           path + ":" + std::to_string(line_no) + ": unreadable mask entry");
    }
    if (row.empty()) continue;
    if (static_cast<int>(row.size()) != num_edges) {
      Fail(ErrorKind::kConfig, path + ":" + std::to_string(line_no) +
                                   ": expected " + std::to_string(num_edges) +
                                   " columns");
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

Scheduler::Scheduler(SchedulerSpec spec, const Topology& topology,
                     uint64_t seed)
    : spec_(std::move(spec)),
      topology_(&topology),
      rng_(HashKeys({seed, 0x5c4edULL})) {
  ValidateScheduler(spec_, topology);
  last_fire_.assign(topology.num_edges(), -1);
}

Mask Scheduler::Next() {
  const int m = topology_->num_edges();
  Mask mask(m, 0);
  if (std::holds_alternative<SynchronousSchedule>(spec_)) {
    std::fill(mask.begin(), mask.end(), 1);
  } else if (const auto* s = std::get_if<IidBernoulliSchedule>(&spec_)) {
    for (int e = 0; e < m; ++e) {
      const double p = s->p.size() == 1 ? s->p[0] : s->p[e];
      mask[e] = rng_.Bernoulli(p);
    }
  } else if (const auto* s = std::get_if<CyclicSchedule>(&spec_)) {
    if (m > 0) {
      const int slot = static_cast<int>(step_ % m);
      mask[s->order.empty() ? slot : s->order[slot]] = 1;
    }
  } else if (std::holds_alternative<PersistentlyExcitingSchedule>(spec_)) {
    mask = NextPersistent();
  } else if (std::holds_alternative<AdaptiveCounterSchedule>(spec_)) {
    mask = NextAdaptive();
  } else {
    const auto& rows = std::get<ScriptedSchedule>(spec_).rows;
    if (step_ < static_cast<int64_t>(rows.size())) mask = rows[step_];
  }
  ++step_;
  return mask;
}

Mask Scheduler::NextPersistent() {
  const int window = std::get<PersistentlyExcitingSchedule>(spec_).window;
  const int m = topology_->num_edges();
  Mask mask(m, 0);
  std::vector<int> free_edges;
  for (int e = 0; e < m; ++e) {
    if (step_ - last_fire_[e] >= window) {
      mask[e] = 1;
    } else {
      free_edges.push_back(e);
    }
  }
  if (!free_edges.empty()) {
    mask[free_edges[rng_.Below(free_edges.size())]] = 1;
  }
  for (int e = 0; e < m; ++e) {
    if (mask[e]) last_fire_[e] = step_;
  }
  return mask;
}

Mask Scheduler::NextAdaptive() {
  const auto& s = std::get<AdaptiveCounterSchedule>(spec_);
  const Topology& t = *topology_;
  std::vector<int> counter(t.num_agents(), 0);
  for (const Mask& past : history_) {
    for (int i = 0; i < t.num_agents(); ++i) {
      for (int e : t.IncidentEdges(i)) {
        if (past[e]) {
          ++counter[i];
          break;
        }
      }
    }
  }
  Mask mask(t.num_edges(), 0);
  for (int e = 0; e < t.num_edges(); ++e) {
    const Edge& edge = t.edge(e);
    const double exponent =
        static_cast<double>(counter[edge.first]) * counter[edge.second];
    const double p =
        s.base[edge.first] * s.base[edge.second] * std::pow(s.decay, exponent);
    mask[e] = rng_.Bernoulli(p);
  }
  if (s.window > 0) {
    history_.push_back(mask);
    if (static_cast<int>(history_.size()) > s.window) history_.pop_front();
  }
  return mask;
}

double EmpiricalRate(int64_t gamma, int64_t k) {
  Require(k >= 1, "empirical rate needs k >= 1");
  return static_cast<double>(gamma) / static_cast<double>(k);
}

}  // namespace dualdec
