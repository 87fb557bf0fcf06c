#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dualdec/config.h"
#include "dualdec/errors.h"

using namespace dualdec;

namespace {

const char* kPathSpec = R"({
  "name": "path3",
  "graph": {"kind": "edges", "agents": 3, "edges": [[2, 1], [2, 3]]},
  "problem": {"agents": [
    {"box": [[-10, 16]], "atoms": [{"type": "quadratic", "weight": 1, "center": 0}]},
    {"box": [[null, null]], "atoms": [{"type": "quadratic", "weight": 1, "center": 3}]},
    {"box": [[0.01, 10]], "regularizer": 0.005,
     "atoms": [{"type": "hinge", "slope": 1, "knee": 6}, {"type": "entropy", "scale": 2}]}
  ]},
  "scheduler": {"type": "cyclic", "order": [2, 1]},
  "stepsize": {"rule": {"type": "shift", "c0": 0.15, "q": 0.51}, "clock": "local"},
  "noise": {"type": "zero_mean", "shape": "bell", "b": 0.05},
  "run": {"iterations": 500, "seed": 9},
  "output": {"stride": 10, "channels": ["λ", "Q"]},
  "variants": [{"name": "iid", "scheduler": {"type": "iid", "p": 0.5}}]
})";

std::string ParseError(const std::string& text) {
  try {
    ParseExperiment(text);
  } catch (const dualdec::Error& e) {
    CHECK(e.kind() == ErrorKind::kConfig);
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("parse a full document") {
  const ExperimentSpec s = ParseExperiment(kPathSpec);
  CHECK(s.name == "path3");
  CHECK(s.graph.edges == std::vector<AgentPair>{{1, 0}, {1, 2}});
  REQUIRE(s.problem.agents.size() == 3);
  CHECK(s.problem.agents[0].box[0] == Interval{-10, 16});
  CHECK(s.problem.agents[1].box[0] == Interval{});
  CHECK(s.problem.agents[2].atoms.size() == 2);
  CHECK(s.problem.agents[2].regularizer == 0.005);
  CHECK(std::get<CyclicSchedule>(s.scheduler).order == std::vector<int>{1, 0});
  CHECK(std::get<ClosedFormShift>(s.stepsize.rules[0]) == ClosedFormShift{0.15, 0.51});
  CHECK(std::get<ZeroMeanNoise>(s.noise).shape == NoiseShape::kBell);
  CHECK(s.run.seed == 9);
  CHECK(s.output.channels == std::vector<std::string>{"lambda", "Q"});
  REQUIRE(s.variants.size() == 1);
  CHECK(std::get<IidBernoulliSchedule>(*s.variants[0].scheduler).p == std::vector<double>{0.5});
}

TEST_CASE("serialize then parse is the identity") {
  const ExperimentSpec s = ParseExperiment(kPathSpec);
  const std::string text = SerializeExperiment(s);
  const ExperimentSpec back = ParseExperiment(text);
  CHECK(back == s);
  CHECK(SerializeExperiment(back) == text);
}

TEST_CASE("syntax errors name the line") {
  const std::string msg = ParseError("{\n  \"name\": \"x\",\n  \"graph\": {,\n}");
  CHECK(msg.rfind("line 3", 0) == 0);
}

TEST_CASE("schema errors name the field path") {
  std::string bad = kPathSpec;
  bad.replace(bad.find("\"weight\": 1, \"center\": 3"), 11, "\"weight\": \"1\"");
  CHECK(ParseError(bad).find("/problem/agents/1/atoms/0/weight") != std::string::npos);

  std::string unknown = kPathSpec;
  unknown.replace(unknown.find("\"seed\": 9"), 9, "\"seed\": 9, \"sed\": 1");
  CHECK(ParseError(unknown).find("/run") != std::string::npos);

  std::string count = kPathSpec;
  count.replace(count.find("\"agents\": 3"), 11, "\"agents\": 4");
  CHECK(ParseError(count).find("/problem/agents") != std::string::npos);

  std::string dup = kPathSpec;
  dup.replace(dup.find("\"variants\": ["), 13,
              "\"variants\": [{\"name\": \"iid\"}, ");
  CHECK(ParseError(dup).find("duplicate variant name") != std::string::npos);

  std::string channel = kPathSpec;
  channel.replace(channel.find("\"Q\"]"), 4, "\"mu\"]");
  CHECK(ParseError(channel).find("/output/channels/1") != std::string::npos);
}

TEST_CASE("scripted masks load relative to the config file") {
  const auto dir = std::filesystem::temp_directory_path() / "dualdec_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream m(dir / "masks.txt");
    m << "# starve edge 2\n1 0\n1,0\n";
  }
  std::string text = kPathSpec;
  const std::string cyclic = R"({"type": "cyclic", "order": [2, 1]})";
  text.replace(text.find(cyclic), cyclic.size(), R"({"type": "scripted", "file": "masks.txt"})");
  {
    std::ofstream c(dir / "spec.json");
    c << text;
  }
  const ExperimentSpec s = LoadExperiment((dir / "spec.json").string());
  const auto& sc = std::get<ScriptedSchedule>(s.scheduler);
  CHECK(sc.source == (dir / "masks.txt").string());
  const ScriptedSchedule loaded = LoadMaskFile(sc.source, 2);
  CHECK(loaded.rows == std::vector<Mask>{Mask{1, 0}, Mask{1, 0}});
  CHECK_THROWS_AS(LoadMaskFile(sc.source, 3), dualdec::Error);
  std::filesystem::remove_all(dir);
}
