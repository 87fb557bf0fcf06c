#include "dualdec/config.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dualdec/errors.h"

namespace dualdec {

namespace {

using Json = nlohmann::ordered_json;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

[[noreturn]] void Bad(const std::string& path, const std::string& what) {
  Fail(ErrorKind::kConfig, (path.empty() ? "/" : path) + ": " + what);
}

void CheckObject(const Json& j, const std::string& path,
                 std::initializer_list<const char*> allowed) {
  if (!j.is_object()) Bad(path, "expected an object");
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!ok.count(item.key())) Bad(path + "/" + item.key(), "unknown field");
  }
}

const Json* Field(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

const Json& Need(const Json& j, const std::string& path, const char* key) {
  const Json* f = Field(j, key);
  if (!f) Bad(path + "/" + key, "missing required field");
  return *f;
}

double Number(const Json& j, const std::string& path) {
  if (!j.is_number()) Bad(path, "expected a number");
  return j.get<double>();
}

double NumberOr(const Json& j, const std::string& path, const char* key,
                double fallback) {
  const Json* f = Field(j, key);
  return f ? Number(*f, path + "/" + key) : fallback;
}

int64_t Integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) Bad(path, "expected an integer");
  return j.get<int64_t>();
}

uint64_t Unsigned(const Json& j, const std::string& path) {
  if (!j.is_number_unsigned()) Bad(path, "expected a non-negative integer");
  return j.get<uint64_t>();
}

std::string String(const Json& j, const std::string& path) {
  if (!j.is_string()) Bad(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> Numbers(const Json& j, const std::string& path) {
  if (!j.is_array()) Bad(path, "expected an array of numbers");
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i) {
    out.push_back(Number(j[i], path + "/" + std::to_string(i)));
  }
  return out;
}

// Bounds use null for an infinite side.
double Bound(const Json& j, const std::string& path, double inf) {
  return j.is_null() ? inf : Number(j, path);
}

Json BoundJson(double v) {
  return std::isinf(v) ? Json(nullptr) : Json(v);
}

// ---- graph

GraphSpec ParseGraph(const Json& j, const std::string& path) {
  CheckObject(j, path, {"kind", "agents", "edges", "radius", "target_edges", "seed"});
  GraphSpec g;
  g.kind = String(Need(j, path, "kind"), path + "/kind");
  const int64_t n = Integer(Need(j, path, "agents"), path + "/agents");
  if (n < 1) Bad(path + "/agents", "need at least one agent");
  g.agents = static_cast<int>(n);
  if (g.kind == "edges") {
    const Json& e = Need(j, path, "edges");
    if (!e.is_array()) Bad(path + "/edges", "expected an array of pairs");
    for (size_t i = 0; i < e.size(); ++i) {
      const std::string p = path + "/edges/" + std::to_string(i);
      if (!e[i].is_array() || e[i].size() != 2) Bad(p, "expected [i, j]");
      const int64_t a = Integer(e[i][0], p + "/0");
      const int64_t b = Integer(e[i][1], p + "/1");
      if (a < 1 || a > n || b < 1 || b > n) Bad(p, "agent index out of range");
      if (a == b) Bad(p, "self-loop");
      g.edges.emplace_back(static_cast<int>(a - 1), static_cast<int>(b - 1));
    }
  } else if (g.kind == "rgg") {
    g.radius = NumberOr(j, path, "radius", 0);
    if (const Json* t = Field(j, "target_edges")) {
      g.target_edges = static_cast<int>(Integer(*t, path + "/target_edges"));
    }
    if (g.radius <= 0 && g.target_edges <= 0) {
      Bad(path, "rgg needs a positive radius or target_edges");
    }
    if (const Json* s = Field(j, "seed")) g.seed = Unsigned(*s, path + "/seed");
  } else if (g.kind != "path" && g.kind != "star") {
    Bad(path + "/kind", "unknown graph kind '" + g.kind +
                            "' (path, star, edges, rgg)");
  }
  return g;
}

Json GraphJson(const GraphSpec& g) {
  Json j;
  j["kind"] = g.kind;
  j["agents"] = g.agents;
  if (g.kind == "edges") {
    Json e = Json::array();
    for (const auto& [a, b] : g.edges) e.push_back({a + 1, b + 1});
    j["edges"] = e;
  } else if (g.kind == "rgg") {
    if (g.radius > 0) j["radius"] = g.radius;
    if (g.target_edges > 0) j["target_edges"] = g.target_edges;
    j["seed"] = g.seed;
  }
  return j;
}

// ---- problem

CostAtom ParseAtom(const Json& j, const std::string& path, int dim) {
  if (!j.is_object()) Bad(path, "expected an object");
  const std::string type = String(Need(j, path, "type"), path + "/type");
  int coord = 0;
  if (const Json* c = Field(j, "coord")) {
    const int64_t v = Integer(*c, path + "/coord");
    if (v < 1 || v > dim) Bad(path + "/coord", "coordinate out of range");
    coord = static_cast<int>(v - 1);
  }
  if (type == "quadratic") {
    CheckObject(j, path, {"type", "coord", "weight", "center"});
    return QuadraticAtom{coord, NumberOr(j, path, "weight", 1),
                         NumberOr(j, path, "center", 0)};
  }
  if (type == "hinge") {
    CheckObject(j, path, {"type", "coord", "slope", "knee", "offset"});
    return HingeAtom{coord, Number(Need(j, path, "slope"), path + "/slope"),
                     Number(Need(j, path, "knee"), path + "/knee"),
                     NumberOr(j, path, "offset", 0)};
  }
  if (type == "entropy") {
    CheckObject(j, path, {"type", "coord", "scale"});
    return EntropyAtom{coord, Number(Need(j, path, "scale"), path + "/scale")};
  }
  if (type == "linear") {
    CheckObject(j, path, {"type", "coord", "coef"});
    return LinearAtom{coord, Number(Need(j, path, "coef"), path + "/coef")};
  }
  Bad(path + "/type",
      "unknown atom type '" + type + "' (quadratic, hinge, entropy, linear)");
}

Json AtomJson(const CostAtom& atom) {
  Json j = std::visit(
      Overloaded{
          [](const QuadraticAtom& a) {
            return Json{{"type", "quadratic"}, {"weight", a.weight}, {"center", a.center}};
          },
          [](const HingeAtom& a) {
            return Json{{"type", "hinge"}, {"slope", a.slope}, {"knee", a.knee},
                        {"offset", a.offset}};
          },
          [](const EntropyAtom& a) {
            return Json{{"type", "entropy"}, {"scale", a.scale}};
          },
          [](const LinearAtom& a) {
            return Json{{"type", "linear"}, {"coef", a.coef}};
          },
      },
      atom);
  const int coord = AtomCoord(atom);
  if (coord != 0) j["coord"] = coord + 1;
  return j;
}

LocalProblem ParseAgent(const Json& j, const std::string& path) {
  CheckObject(j, path, {"dim", "box", "atoms", "regularizer"});
  LocalProblem l;
  if (const Json* d = Field(j, "dim")) {
    const int64_t v = Integer(*d, path + "/dim");
    if (v < 1) Bad(path + "/dim", "dimension must be >= 1");
    l.dim = static_cast<int>(v);
  }
  l.box.assign(l.dim, Interval{});
  if (const Json* b = Field(j, "box")) {
    if (!b->is_array() || static_cast<int>(b->size()) != l.dim) {
      Bad(path + "/box", "expected one [lo, hi] per coordinate");
    }
    for (int d = 0; d < l.dim; ++d) {
      const std::string p = path + "/box/" + std::to_string(d);
      const Json& iv = (*b)[d];
      if (!iv.is_array() || iv.size() != 2) Bad(p, "expected [lo, hi]");
      l.box[d] = {Bound(iv[0], p + "/0", -kInf), Bound(iv[1], p + "/1", kInf)};
      if (l.box[d].lo > l.box[d].hi) Bad(p, "empty interval");
    }
  }
  l.regularizer = NumberOr(j, path, "regularizer", 0);
  if (l.regularizer < 0) Bad(path + "/regularizer", "must be >= 0");
  if (const Json* a = Field(j, "atoms")) {
    if (!a->is_array()) Bad(path + "/atoms", "expected an array");
    for (size_t i = 0; i < a->size(); ++i) {
      l.atoms.push_back(
          ParseAtom((*a)[i], path + "/atoms/" + std::to_string(i), l.dim));
    }
  }
  try {
    l.Validate();
  } catch (const Error& e) {
    Bad(path, e.what());
  }
  return l;
}

Json AgentJson(const LocalProblem& l) {
  Json j;
  if (l.dim != 1) j["dim"] = l.dim;
  Json box = Json::array();
  for (const Interval& iv : l.box) box.push_back({BoundJson(iv.lo), BoundJson(iv.hi)});
  j["box"] = box;
  if (l.regularizer != 0) j["regularizer"] = l.regularizer;
  Json atoms = Json::array();
  for (const CostAtom& a : l.atoms) atoms.push_back(AtomJson(a));
  j["atoms"] = atoms;
  return j;
}

std::vector<std::vector<double>> ParseRows(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) Bad(path, "expected a non-empty matrix");
  std::vector<std::vector<double>> rows;
  for (size_t r = 0; r < j.size(); ++r) {
    rows.push_back(Numbers(j[r], path + "/" + std::to_string(r)));
    if (rows.back().size() != rows.front().size()) {
      Bad(path + "/" + std::to_string(r), "ragged matrix");
    }
  }
  return rows;
}

ProblemSpec ParseProblem(const Json& j, const std::string& path) {
  CheckObject(j, path, {"agents", "couplings"});
  ProblemSpec p;
  const Json& agents = Need(j, path, "agents");
  if (!agents.is_array()) Bad(path + "/agents", "expected an array");
  for (size_t i = 0; i < agents.size(); ++i) {
    p.agents.push_back(ParseAgent(agents[i], path + "/agents/" + std::to_string(i)));
  }
  if (const Json* c = Field(j, "couplings")) {
    if (!c->is_array()) Bad(path + "/couplings", "expected an array");
    for (size_t e = 0; e < c->size(); ++e) {
      const std::string ep = path + "/couplings/" + std::to_string(e);
      CheckObject((*c)[e], ep, {"first", "second"});
      p.couplings.push_back({ParseRows(Need((*c)[e], ep, "first"), ep + "/first"),
                             ParseRows(Need((*c)[e], ep, "second"), ep + "/second")});
    }
  }
  return p;
}

Json ProblemJson(const ProblemSpec& p) {
  Json j;
  Json agents = Json::array();
  for (const LocalProblem& l : p.agents) agents.push_back(AgentJson(l));
  j["agents"] = agents;
  if (!p.couplings.empty()) {
    Json c = Json::array();
    for (const CouplingSpec& cs : p.couplings) {
      c.push_back({{"first", cs.first}, {"second", cs.second}});
    }
    j["couplings"] = c;
  }
  return j;
}

// ---- scheduler

Mask ParseMaskRow(const Json& j, const std::string& path) {
  const std::string s = String(j, path);
  Mask m;
  for (char ch : s) {
    if (ch != '0' && ch != '1') Bad(path, "mask rows are strings of 0/1");
    m.push_back(ch == '1');
  }
  return m;
}

SchedulerSpec ParseScheduler(const Json& j, const std::string& path) {
  if (!j.is_object()) Bad(path, "expected an object");
  const std::string type = String(Need(j, path, "type"), path + "/type");
  if (type == "synchronous") {
    CheckObject(j, path, {"type"});
    return SynchronousSchedule{};
  }
  if (type == "iid") {
    CheckObject(j, path, {"type", "p"});
    const Json& p = Need(j, path, "p");
    return IidBernoulliSchedule{p.is_number() ? std::vector<double>{Number(p, path + "/p")}
                                              : Numbers(p, path + "/p")};
  }
  if (type == "cyclic") {
    CheckObject(j, path, {"type", "order"});
    CyclicSchedule c;
    if (const Json* o = Field(j, "order")) {
      for (double v : Numbers(*o, path + "/order")) {
        c.order.push_back(static_cast<int>(v) - 1);
      }
    }
    return c;
  }
  if (type == "persistent") {
    CheckObject(j, path, {"type", "window"});
    return PersistentlyExcitingSchedule{
        static_cast<int>(Integer(Need(j, path, "window"), path + "/window"))};
  }
  if (type == "adaptive") {
    CheckObject(j, path, {"type", "base", "decay", "window"});
    AdaptiveCounterSchedule a;
    a.base = Numbers(Need(j, path, "base"), path + "/base");
    a.decay = NumberOr(j, path, "decay", a.decay);
    if (const Json* w = Field(j, "window")) {
      a.window = static_cast<int>(Integer(*w, path + "/window"));
    }
    return a;
  }
  if (type == "scripted") {
    CheckObject(j, path, {"type", "rows", "file"});
    ScriptedSchedule s;
    if (const Json* f = Field(j, "file")) {
      s.source = String(*f, path + "/file");
    } else {
      const Json& rows = Need(j, path, "rows");
      if (!rows.is_array()) Bad(path + "/rows", "expected an array of strings");
      for (size_t r = 0; r < rows.size(); ++r) {
        s.rows.push_back(ParseMaskRow(rows[r], path + "/rows/" + std::to_string(r)));
      }
    }
    return s;
  }
  Bad(path + "/type", "unknown scheduler '" + type +
                          "' (synchronous, iid, cyclic, persistent, adaptive, scripted)");
}

Json SchedulerJson(const SchedulerSpec& spec) {
  return std::visit(
      Overloaded{
          [](const SynchronousSchedule&) { return Json{{"type", "synchronous"}}; },
          [](const IidBernoulliSchedule& s) { return Json{{"type", "iid"}, {"p", s.p}}; },
          [](const CyclicSchedule& s) {
            Json j{{"type", "cyclic"}};
            if (!s.order.empty()) {
              Json o = Json::array();
              for (int e : s.order) o.push_back(e + 1);
              j["order"] = o;
            }
            return j;
          },
          [](const PersistentlyExcitingSchedule& s) {
            return Json{{"type", "persistent"}, {"window", s.window}};
          },
          [](const AdaptiveCounterSchedule& s) {
            return Json{{"type", "adaptive"}, {"base", s.base}, {"decay", s.decay},
                        {"window", s.window}};
          },
          [](const ScriptedSchedule& s) {
            Json j{{"type", "scripted"}};
            if (!s.source.empty()) {
              j["file"] = s.source;
            } else {
              Json rows = Json::array();
              for (const Mask& m : s.rows) {
                std::string row;
                for (uint8_t v : m) row += v ? '1' : '0';
                rows.push_back(row);
              }
              j["rows"] = rows;
            }
            return j;
          },
      },
      spec);
}

// ---- stepsize

StepsizeRule ParseRule(const Json& j, const std::string& path) {
  if (!j.is_object()) Bad(path, "expected an object");
  const std::string type = String(Need(j, path, "type"), path + "/type");
  StepsizeRule rule;
  if (type == "power") {
    CheckObject(j, path, {"type", "c", "q"});
    rule = PowerDecay{Number(Need(j, path, "c"), path + "/c"),
                      Number(Need(j, path, "q"), path + "/q")};
  } else if (type == "log") {
    CheckObject(j, path, {"type", "c"});
    rule = LogDecay{Number(Need(j, path, "c"), path + "/c")};
  } else if (type == "shift") {
    CheckObject(j, path, {"type", "c0", "q"});
    rule = ClosedFormShift{NumberOr(j, path, "c0", 0.15), NumberOr(j, path, "q", 0.51)};
  } else if (type == "constant") {
    CheckObject(j, path, {"type", "c"});
    rule = ConstantStep{Number(Need(j, path, "c"), path + "/c")};
  } else {
    Bad(path + "/type", "unknown stepsize rule '" + type +
                            "' (power, log, shift, constant)");
  }
  try {
    ValidateRule(rule);
  } catch (const Error& e) {
    Bad(path, e.what());
  }
  return rule;
}

Json RuleJson(const StepsizeRule& rule) {
  return std::visit(
      Overloaded{
          [](const PowerDecay& r) { return Json{{"type", "power"}, {"c", r.c}, {"q", r.q}}; },
          [](const LogDecay& r) { return Json{{"type", "log"}, {"c", r.c}}; },
          [](const ClosedFormShift& r) {
            return Json{{"type", "shift"}, {"c0", r.c0}, {"q", r.q}};
          },
          [](const ConstantStep& r) { return Json{{"type", "constant"}, {"c", r.c}}; },
      },
      rule);
}

StepsizeSpec ParseStepsize(const Json& j, const std::string& path) {
  CheckObject(j, path, {"rule", "rules", "clock"});
  StepsizeSpec s;
  if (const Json* r = Field(j, "rule")) {
    if (Field(j, "rules")) Bad(path, "give either rule or rules, not both");
    s.rules = {ParseRule(*r, path + "/rule")};
  } else {
    const Json& rules = Need(j, path, "rules");
    if (!rules.is_array() || rules.empty()) Bad(path + "/rules", "expected a non-empty array");
    s.rules.clear();
    for (size_t i = 0; i < rules.size(); ++i) {
      s.rules.push_back(ParseRule(rules[i], path + "/rules/" + std::to_string(i)));
    }
  }
  if (const Json* c = Field(j, "clock")) {
    const std::string clock = String(*c, path + "/clock");
    if (clock == "local") {
      s.clock = StepsizeClock::kLocal;
    } else if (clock == "global") {
      s.clock = StepsizeClock::kGlobal;
    } else {
      Bad(path + "/clock", "expected 'local' or 'global'");
    }
  }
  return s;
}

Json StepsizeJson(const StepsizeSpec& s) {
  Json j;
  if (s.rules.size() == 1) {
    j["rule"] = RuleJson(s.rules.front());
  } else {
    Json rules = Json::array();
    for (const StepsizeRule& r : s.rules) rules.push_back(RuleJson(r));
    j["rules"] = rules;
  }
  j["clock"] = s.clock == StepsizeClock::kLocal ? "local" : "global";
  return j;
}

// ---- noise

ZeroMeanNoise ParseCore(const Json& j, const std::string& path,
                        std::initializer_list<const char*> allowed) {
  CheckObject(j, path, allowed);
  ZeroMeanNoise z;
  if (const Json* s = Field(j, "shape")) {
    const std::string shape = String(*s, path + "/shape");
    if (shape == "uniform") {
      z.shape = NoiseShape::kUniform;
    } else if (shape == "bell") {
      z.shape = NoiseShape::kBell;
    } else {
      Bad(path + "/shape", "expected 'uniform' or 'bell'");
    }
  }
  z.half_width = NumberOr(j, path, "b", 0);
  if (z.half_width < 0) Bad(path + "/b", "must be >= 0");
  return z;
}

NoiseSpec ParseNoise(const Json& j, const std::string& path) {
  if (!j.is_object()) Bad(path, "expected an object");
  const std::string type = String(Need(j, path, "type"), path + "/type");
  if (type == "none") {
    CheckObject(j, path, {"type"});
    return NoNoise{};
  }
  if (type == "zero_mean") return ParseCore(j, path, {"type", "shape", "b"});
  if (type == "biased") {
    CheckObject(j, path, {"type", "bias", "epsilon", "core"});
    BiasedNoise b;
    if (const Json* v = Field(j, "bias")) b.bias = Numbers(*v, path + "/bias");
    b.epsilon = NumberOr(j, path, "epsilon", 0);
    if (b.epsilon < 0) Bad(path + "/epsilon", "must be >= 0");
    if (const Json* c = Field(j, "core")) b.core = ParseCore(*c, path + "/core", {"shape", "b"});
    return b;
  }
  Bad(path + "/type", "unknown noise '" + type + "' (none, zero_mean, biased)");
}

Json CoreJson(const ZeroMeanNoise& z) {
  return Json{{"shape", z.shape == NoiseShape::kUniform ? "uniform" : "bell"},
              {"b", z.half_width}};
}

Json NoiseJson(const NoiseSpec& spec) {
  return std::visit(Overloaded{
                        [](const NoNoise&) { return Json{{"type", "none"}}; },
                        [](const ZeroMeanNoise& z) {
                          Json j{{"type", "zero_mean"}};
                          j.update(CoreJson(z));
                          return j;
                        },
                        [](const BiasedNoise& b) {
                          Json j{{"type", "biased"}};
                          if (!b.bias.empty()) {
                            j["bias"] = b.bias;
                          } else {
                            j["epsilon"] = b.epsilon;
                          }
                          j["core"] = CoreJson(b.core);
                          return j;
                        },
                    },
                    spec);
}

// ---- run / output / variants

RunSpec ParseRun(const Json& j, const std::string& path) {
  CheckObject(j, path, {"iterations", "seed", "lambda0"});
  RunSpec r;
  if (const Json* i = Field(j, "iterations")) {
    r.iterations = Integer(*i, path + "/iterations");
    if (r.iterations < 1) Bad(path + "/iterations", "must be >= 1");
  }
  if (const Json* s = Field(j, "seed")) r.seed = Unsigned(*s, path + "/seed");
  if (const Json* l = Field(j, "lambda0")) r.lambda0 = Numbers(*l, path + "/lambda0");
  return r;
}

Json RunJson(const RunSpec& r) {
  Json j{{"iterations", r.iterations}, {"seed", r.seed}};
  if (r.lambda0) j["lambda0"] = *r.lambda0;
  return j;
}

const std::set<std::string> kChannels = {"lambda", "Q", "gap", "residual", "witness"};

std::string CanonicalChannel(const std::string& c) {
  return c == "λ" ? "lambda" : c;
}

OutputSpec ParseOutput(const Json& j, const std::string& path) {
  CheckObject(j, path, {"dir", "stride", "channels"});
  OutputSpec o;
  if (const Json* d = Field(j, "dir")) o.dir = String(*d, path + "/dir");
  if (const Json* s = Field(j, "stride")) {
    o.stride = Integer(*s, path + "/stride");
    if (o.stride < 1) Bad(path + "/stride", "must be >= 1");
  }
  if (const Json* c = Field(j, "channels")) {
    if (!c->is_array()) Bad(path + "/channels", "expected an array of strings");
    o.channels.clear();
    for (size_t i = 0; i < c->size(); ++i) {
      const std::string p = path + "/channels/" + std::to_string(i);
      const std::string name = CanonicalChannel(String((*c)[i], p));
      if (!kChannels.count(name)) Bad(p, "unknown channel '" + name + "'");
      o.channels.push_back(name);
    }
  }
  return o;
}

Json OutputJson(const OutputSpec& o) {
  Json j;
  if (!o.dir.empty()) j["dir"] = o.dir;
  j["stride"] = o.stride;
  j["channels"] = o.channels;
  return j;
}

VariantSpec ParseVariant(const Json& j, const std::string& path) {
  CheckObject(j, path, {"name", "graph", "scheduler", "stepsize", "noise"});
  VariantSpec v;
  v.name = String(Need(j, path, "name"), path + "/name");
  if (v.name.empty()) Bad(path + "/name", "must not be empty");
  if (const Json* g = Field(j, "graph")) v.graph = ParseGraph(*g, path + "/graph");
  if (const Json* s = Field(j, "scheduler")) v.scheduler = ParseScheduler(*s, path + "/scheduler");
  if (const Json* s = Field(j, "stepsize")) v.stepsize = ParseStepsize(*s, path + "/stepsize");
  if (const Json* n = Field(j, "noise")) v.noise = ParseNoise(*n, path + "/noise");
  return v;
}

Json VariantJson(const VariantSpec& v) {
  Json j{{"name", v.name}};
  if (v.graph) j["graph"] = GraphJson(*v.graph);
  if (v.scheduler) j["scheduler"] = SchedulerJson(*v.scheduler);
  if (v.stepsize) j["stepsize"] = StepsizeJson(*v.stepsize);
  if (v.noise) j["noise"] = NoiseJson(*v.noise);
  return j;
}

int LineOf(const std::string& text, size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + byte, '\n'));
}

}  // namespace

void ValidateExperiment(const ExperimentSpec& spec) {
  if (static_cast<int>(spec.problem.agents.size()) != spec.graph.agents) {
    Bad("/problem/agents", "graph has " + std::to_string(spec.graph.agents) +
                               " agents, problem lists " +
                               std::to_string(spec.problem.agents.size()));
  }
  if (spec.output.stride < 1) Bad("/output/stride", "must be >= 1");
  std::set<std::string> names;
  for (size_t i = 0; i < spec.variants.size(); ++i) {
    const VariantSpec& v = spec.variants[i];
    if (!names.insert(v.name).second) {
      Bad("/variants/" + std::to_string(i) + "/name",
          "duplicate variant name '" + v.name + "'");
    }
    if (v.graph && v.graph->agents != spec.graph.agents) {
      Bad("/variants/" + std::to_string(i) + "/graph/agents",
          "variant graph must keep the agent count");
    }
  }
}

ExperimentSpec ParseExperiment(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    Fail(ErrorKind::kConfig, "line " + std::to_string(LineOf(text, e.byte)) +
                                 ": JSON syntax error: " + e.what());
  }
  CheckObject(j, "", {"name", "graph", "problem", "scheduler", "stepsize", "noise", "run",
                      "reference", "output", "variants"});
  ExperimentSpec s;
  if (const Json* n = Field(j, "name")) s.name = String(*n, "/name");
  s.graph = ParseGraph(Need(j, "", "graph"), "/graph");
  s.problem = ParseProblem(Need(j, "", "problem"), "/problem");
  if (const Json* v = Field(j, "scheduler")) s.scheduler = ParseScheduler(*v, "/scheduler");
  if (const Json* v = Field(j, "stepsize")) s.stepsize = ParseStepsize(*v, "/stepsize");
  if (const Json* v = Field(j, "noise")) s.noise = ParseNoise(*v, "/noise");
  if (const Json* v = Field(j, "run")) s.run = ParseRun(*v, "/run");
  if (const Json* v = Field(j, "reference")) {
    if (!v->is_boolean()) Bad("/reference", "expected true or false");
    s.reference = v->get<bool>();
  }
  if (const Json* v = Field(j, "output")) s.output = ParseOutput(*v, "/output");
  if (const Json* v = Field(j, "variants")) {
    if (!v->is_array()) Bad("/variants", "expected an array");
    for (size_t i = 0; i < v->size(); ++i) {
      s.variants.push_back(ParseVariant((*v)[i], "/variants/" + std::to_string(i)));
    }
  }
  ValidateExperiment(s);
  return s;
}

ExperimentSpec LoadExperiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorKind::kConfig, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  ExperimentSpec spec;
  try {
    spec = ParseExperiment(buf.str());
  } catch (const Error& e) {
    Fail(e.kind(), path + ":" + e.what());
  }
  // Mask files are resolved relative to the config file.
  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](SchedulerSpec& s) {
    if (auto* sc = std::get_if<ScriptedSchedule>(&s)) {
      if (!sc->source.empty() && std::filesystem::path(sc->source).is_relative()) {
        sc->source = (base / sc->source).string();
      }
    }
  };
  resolve(spec.scheduler);
  for (VariantSpec& v : spec.variants) {
    if (v.scheduler) resolve(*v.scheduler);
  }
  return spec;
}

std::string SerializeExperiment(const ExperimentSpec& s) {
  Json j;
  j["name"] = s.name;
  j["graph"] = GraphJson(s.graph);
  j["problem"] = ProblemJson(s.problem);
  j["scheduler"] = SchedulerJson(s.scheduler);
  j["stepsize"] = StepsizeJson(s.stepsize);
  j["noise"] = NoiseJson(s.noise);
  j["run"] = RunJson(s.run);
  j["reference"] = s.reference;
  j["output"] = OutputJson(s.output);
  if (!s.variants.empty()) {
    Json v = Json::array();
    for (const VariantSpec& vs : s.variants) v.push_back(VariantJson(vs));
    j["variants"] = v;
  }
  return j.dump(2) + "\n";
}

}  // namespace dualdec
