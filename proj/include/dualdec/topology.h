#ifndef DUALDEC_TOPOLOGY_H_
#define DUALDEC_TOPOLOGY_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace dualdec {

// Oriented edge (first < second). The dual block of the edge is owned, and
// updated, by `first`. Agent indices are 0-based.
struct Edge {
  int first = 0;
  int second = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using AgentPair = std::pair<int, int>;

// Undirected agent network with its oriented edge list. Edge indices follow
// the lexicographic order of (first, second) and are stable across runs.
// Immutable after construction.
class Topology {
 public:
  // Builds from an arbitrary list of unordered pairs. Duplicates (in either
  // orientation) are merged. Throws on self-loops, out-of-range endpoints and
  // num_agents < 1.
  static Topology Build(int num_agents, std::span<const AgentPair> pairs);
  static Topology Path(int num_agents);
  static Topology Star(int num_agents);  // center 0

  int num_agents() const { return num_agents_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::vector<Edge>& edges() const { return edges_; }
  const Edge& edge(int e) const { return edges_[e]; }

  // Returns -1 when {a, b} is not an edge. Orientation-insensitive.
  int EdgeIndex(int a, int b) const;

  // N_i: agents j with (i, j) in the oriented edge list.
  const std::vector<int>& OwnedNeighbors(int agent) const {
    return owned_neighbors_[agent];
  }
  // Indices of every edge touching the agent, owned or not, ascending.
  const std::vector<int>& IncidentEdges(int agent) const {
    return incident_edges_[agent];
  }
  // Agents owning at least one dual block.
  const std::vector<int>& UpdaterSet() const { return updaters_; }

  bool IsConnected() const;
  bool IsTree() const { return IsConnected() && num_edges() == num_agents_ - 1; }

  // Pairs in edge-index order; Build(num_agents(), EdgePairs()) reproduces
  // this topology exactly.
  std::vector<AgentPair> EdgePairs() const;

  friend bool operator==(const Topology& a, const Topology& b) {
    return a.num_agents_ == b.num_agents_ && a.edges_ == b.edges_;
  }

 private:
  int num_agents_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> owned_neighbors_;
  std::vector<std::vector<int>> incident_edges_;
  std::vector<int> updaters_;
};

struct GeometricGraph {
  Topology topology;
  std::vector<std::pair<double, double>> positions;
  bool connected = false;
};

// Agents placed i.i.d. uniform on the unit square; edge iff distance <= radius.
GeometricGraph RandomGeometricGraph(int num_agents, double radius,
                                    uint64_t seed);

// Smallest radius giving exactly `target_edges` edges for the placement drawn
// from `seed` (ties in distance may overshoot the target).
double RadiusForEdgeCount(int num_agents, int target_edges, uint64_t seed);

}  // namespace dualdec

#endif  // DUALDEC_TOPOLOGY_H_
