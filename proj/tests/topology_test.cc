#include <doctest.h>

#include "dualdec/errors.h"
#include "dualdec/topology.h"

using namespace dualdec;

TEST_CASE("oriented edges follow i<j and lexicographic order") {
  const std::vector<AgentPair> pairs = {{1, 0}, {1, 2}};
  const Topology t = Topology::Build(3, pairs);
  REQUIRE(t.num_edges() == 2);
  CHECK(t.edge(0) == Edge{0, 1});
  CHECK(t.edge(1) == Edge{1, 2});
  CHECK(t.OwnedNeighbors(0) == std::vector<int>{1});
  CHECK(t.OwnedNeighbors(1) == std::vector<int>{2});
  CHECK(t.OwnedNeighbors(2).empty());
  CHECK(t.UpdaterSet() == std::vector<int>{0, 1});
}

TEST_CASE("duplicates in either orientation merge") {
  const std::vector<AgentPair> pairs = {{0, 1}, {1, 0}, {2, 1}, {1, 2}};
  const Topology t = Topology::Build(3, pairs);
  CHECK(t.num_edges() == 2);
  CHECK(t.EdgeIndex(2, 1) == 1);
  CHECK(t.EdgeIndex(0, 2) == -1);
}

TEST_CASE("single agent has no edges and no updaters") {
  const Topology t = Topology::Build(1, {});
  CHECK(t.num_edges() == 0);
  CHECK(t.UpdaterSet().empty());
  CHECK(t.IsConnected());
}

TEST_CASE("50-agent path") {
  const Topology t = Topology::Path(50);
  CHECK(t.num_edges() == 49);
  for (int i = 1; i < 49; ++i) CHECK(t.OwnedNeighbors(i).size() == 1);
  CHECK(t.IsTree());
}

TEST_CASE("invalid inputs") {
  const std::vector<AgentPair> self = {{1, 1}};
  const std::vector<AgentPair> out_of_range = {{0, 3}};
  CHECK_THROWS_AS(Topology::Build(3, self), Error);
  CHECK_THROWS_AS(Topology::Build(3, out_of_range), Error);
  CHECK_THROWS_AS(Topology::Build(0, {}), Error);
}

TEST_CASE("owned neighbour counts sum to the edge count; rebuild is identical") {
  const GeometricGraph g = RandomGeometricGraph(30, 0.3, 11);
  size_t owned = 0;
  for (int i = 0; i < 30; ++i) owned += g.topology.OwnedNeighbors(i).size();
  CHECK(owned == static_cast<size_t>(g.topology.num_edges()));
  const auto pairs = g.topology.EdgePairs();
  CHECK(Topology::Build(30, pairs) == g.topology);
}

TEST_CASE("geometric graph extremes") {
  CHECK(RandomGeometricGraph(2, 2.0, 99).topology.num_edges() == 1);
  const GeometricGraph tiny = RandomGeometricGraph(5, 0.001, 7);
  CHECK(tiny.topology.num_edges() == 0);
  CHECK_FALSE(tiny.connected);
  const GeometricGraph a = RandomGeometricGraph(20, 0.4, 5);
  const GeometricGraph b = RandomGeometricGraph(20, 0.4, 5);
  CHECK(a.topology == b.topology);
}

TEST_CASE("radius search hits the target edge count") {
  const double r = RadiusForEdgeCount(50, 358, 3);
  CHECK(RandomGeometricGraph(50, r, 3).topology.num_edges() == 358);
}
