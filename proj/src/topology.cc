#include "dualdec/topology.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualdec/errors.h"
#include "dualdec/random.h"

namespace dualdec {

Topology Topology::Build(int num_agents, std::span<const AgentPair> pairs) {
  Require(num_agents >= 1, "topology needs at least one agent");
  Topology t;
  t.num_agents_ = num_agents;
  for (const auto& [a, b] : pairs) {
    if (a < 0 || a >= num_agents || b < 0 || b >= num_agents) {
      Fail(ErrorKind::kInvalidArgument,
           "edge endpoint out of range: (" + std::to_string(a + 1) + ", " +
               std::to_string(b + 1) + ")");
    }
    if (a == b) {
      Fail(ErrorKind::kInvalidArgument,
           "self-loop on agent " + std::to_string(a + 1));
    }
    t.edges_.push_back(Edge{std::min(a, b), std::max(a, b)});
  }
  std::sort(t.edges_.begin(), t.edges_.end());
  t.edges_.erase(std::unique(t.edges_.begin(), t.edges_.end()),
                 t.edges_.end());

  t.owned_neighbors_.assign(num_agents, {});
  t.incident_edges_.assign(num_agents, {});
  for (int e = 0; e < t.num_edges(); ++e) {
    const Edge& edge = t.edges_[e];
    t.owned_neighbors_[edge.first].push_back(edge.second);
    t.incident_edges_[edge.first].push_back(e);
    t.incident_edges_[edge.second].push_back(e);
  }
  for (int i = 0; i < num_agents; ++i) {
    if (!t.owned_neighbors_[i].empty()) t.updaters_.push_back(i);
  }
  return t;
}

Topology Topology::Path(int num_agents) {
  std::vector<AgentPair> pairs;
  for (int i = 0; i + 1 < num_agents; ++i) pairs.emplace_back(i, i + 1);
  return Build(num_agents, pairs);
}

Topology Topology::Star(int num_agents) {
  std::vector<AgentPair> pairs;
  for (int i = 1; i < num_agents; ++i) pairs.emplace_back(0, i);
  return Build(num_agents, pairs);
}

int Topology::EdgeIndex(int a, int b) const {
  const Edge key{std::min(a, b), std::max(a, b)};
  auto it = std::lower_bound(edges_.begin(), edges_.end(), key);
  if (it == edges_.end() || *it != key) return -1;
  return static_cast<int>(it - edges_.begin());
}

bool Topology::IsConnected() const {
  std::vector<char> seen(num_agents_, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int e : incident_edges_[v]) {
      const int w = edges_[e].first == v ? edges_[e].second : edges_[e].first;
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
    }
  }
  return count == num_agents_;
}

std::vector<AgentPair> Topology::EdgePairs() const {
  std::vector<AgentPair> out;
  out.reserve(edges_.size());
  for (const Edge& e : edges_) out.emplace_back(e.first, e.second);
  return out;
}

namespace {

std::vector<std::pair<double, double>> PlaceAgents(int n, uint64_t seed) {
  Rng rng(seed);
  std::vector<std::pair<double, double>> pos(n);
  for (auto& p : pos) {
    p.first = rng.Uniform();
    p.second = rng.Uniform();
  }
  return pos;
}

double Distance(const std::pair<double, double>& a,
                const std::pair<double, double>& b) {
  return std::hypot(a.first - b.first, a.second - b.second);
}

}  // namespace

GeometricGraph RandomGeometricGraph(int num_agents, double radius,
                                    uint64_t seed) {
  Require(radius > 0, "radius must be positive");
  GeometricGraph g;
  g.positions = PlaceAgents(num_agents, seed);
  std::vector<AgentPair> pairs;
  for (int i = 0; i < num_agents; ++i) {
    for (int j = i + 1; j < num_agents; ++j) {
      if (Distance(g.positions[i], g.positions[j]) <= radius) {
        pairs.emplace_back(i, j);
      }
    }
  }
  g.topology = Topology::Build(num_agents, pairs);
  g.connected = g.topology.IsConnected();
  return g;
}

double RadiusForEdgeCount(int num_agents, int target_edges, uint64_t seed) {
  const int max_edges = num_agents * (num_agents - 1) / 2;
  Require(target_edges >= 1 && target_edges <= max_edges,
          "target edge count out of range");
  const auto pos = PlaceAgents(num_agents, seed);
  std::vector<double> d;
  d.reserve(max_edges);
  for (int i = 0; i < num_agents; ++i) {
    for (int j = i + 1; j < num_agents; ++j) {
      d.push_back(Distance(pos[i], pos[j]));
    }
  }
  std::nth_element(d.begin(), d.begin() + (target_edges - 1), d.end());
  return d[target_edges - 1];
}

}  // namespace dualdec
