#include "dualdec/experiment.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dualdec/errors.h"
#include "dualdec/random.h"

namespace dualdec {

namespace {

using Json = nlohmann::ordered_json;

[[noreturn]] void ConfigError(const std::string& what) {
  Fail(ErrorKind::kConfig, what);
}

Matrix ToMatrix(const std::vector<std::vector<double>>& rows) {
  Matrix m(rows.size(), rows.empty() ? 0 : rows.front().size());
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::optional<double> RuleExponent(const StepsizeRule& rule) {
  if (const auto* p = std::get_if<PowerDecay>(&rule)) return p->q;
  if (const auto* s = std::get_if<ClosedFormShift>(&rule)) return s->q;
  return std::nullopt;
}

bool HasChannel(const std::vector<std::string>& channels, const char* name) {
  return std::find(channels.begin(), channels.end(), name) != channels.end();
}

Json VectorJson(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) ConfigError("cannot write " + path.string());
  out << text;
}

}  // namespace

Topology BuildTopology(const GraphSpec& g) {
  if (g.kind == "path") return Topology::Path(g.agents);
  if (g.kind == "star") return Topology::Star(g.agents);
  if (g.kind == "edges") return Topology::Build(g.agents, g.edges);
  if (g.kind == "rgg") {
    const double radius = g.radius > 0
                              ? g.radius
                              : RadiusForEdgeCount(g.agents, g.target_edges, g.seed);
    return RandomGeometricGraph(g.agents, radius, g.seed).topology;
  }
  ConfigError("unknown graph kind '" + g.kind + "'");
}

ProblemInstance BuildProblem(const Topology& topology, const ProblemSpec& spec) {
  if (static_cast<int>(spec.agents.size()) != topology.num_agents()) {
    ConfigError("problem lists " + std::to_string(spec.agents.size()) +
                " agents, graph has " + std::to_string(topology.num_agents()));
  }
  if (spec.couplings.empty()) {
    for (size_t i = 0; i < spec.agents.size(); ++i) {
      if (spec.agents[i].dim != 1) {
        ConfigError("/problem/couplings: required when agent " +
                    std::to_string(i + 1) + " is not scalar");
      }
    }
    return ProblemInstance::Consensus(topology, spec.agents);
  }
  if (static_cast<int>(spec.couplings.size()) != topology.num_edges()) {
    ConfigError("/problem/couplings: graph has " +
                std::to_string(topology.num_edges()) + " edges, " +
                std::to_string(spec.couplings.size()) + " couplings given");
  }
  std::vector<EdgeCoupling> couplings;
  for (const CouplingSpec& c : spec.couplings) {
    couplings.push_back({ToMatrix(c.first), ToMatrix(c.second)});
  }
  try {
    return ProblemInstance(topology, spec.agents, std::move(couplings));
  } catch (const Error& e) {
    ConfigError(std::string("/problem/couplings: ") + e.what());
  }
}

RunConfig BuildRunConfig(const ExperimentSpec& spec, const VariantSpec* variant,
                         const ExperimentOptions& options) {
  const GraphSpec& graph = variant && variant->graph ? *variant->graph : spec.graph;
  const Topology topology = BuildTopology(graph);
  RunConfig c;
  c.problem = std::make_shared<const ProblemInstance>(BuildProblem(topology, spec.problem));
  const ProblemInstance& p = *c.problem;

  c.scheduler = variant && variant->scheduler ? *variant->scheduler : spec.scheduler;
  if (auto* s = std::get_if<ScriptedSchedule>(&c.scheduler)) {
    if (!s->source.empty()) c.scheduler = LoadMaskFile(s->source, p.num_edges());
  }
  const StepsizeSpec& step = variant && variant->stepsize ? *variant->stepsize : spec.stepsize;
  c.stepsize = step.rules;
  c.clock = step.clock;
  c.noise = variant && variant->noise ? *variant->noise : spec.noise;
  c.iterations = options.iterations.value_or(spec.run.iterations);
  c.seed = options.seed.value_or(spec.run.seed);
  if (spec.run.lambda0) {
    c.lambda0 = Eigen::Map<const Vector>(spec.run.lambda0->data(),
                                         static_cast<Eigen::Index>(spec.run.lambda0->size()));
  }
  const std::vector<std::string>& channels = options.channels.value_or(spec.output.channels);
  c.record_lambda = HasChannel(channels, "lambda") || HasChannel(channels, "λ");
  c.record_witness = HasChannel(channels, "witness");
  c.stride = spec.output.stride;
  if (spec.reference && p.IsScalarConsensus() && p.topology().IsConnected()) {
    c.reference = ComputeReference(p);
  }
  try {
    ValidateRunConfig(c);
  } catch (const Error& e) {
    ConfigError(std::string(variant ? "variant '" + variant->name + "': " : "") + e.what());
  }
  return c;
}

std::string ResolveOutputDir(const ExperimentSpec& spec,
                             const ExperimentOptions& options) {
  if (options.out_dir) return *options.out_dir;
  if (!spec.output.dir.empty()) return spec.output.dir;
  if (const char* env = std::getenv("DUALDEC_OUT_DIR"); env && *env) return env;
  return "out";
}

std::string SummaryJson(const VariantOutcome& o) {
  const RunConfig& c = o.config;
  const ProblemInstance& p = *c.problem;
  const Trace& t = o.result.trace;
  const MonitorReport& r = o.report;
  const int64_t last = t.iterations();

  Json j;
  j["variant"] = o.name;
  j["seed"] = c.seed;
  j["iterations"] = c.iterations;
  j["problem"] = {{"agents", p.num_agents()},
                  {"edges", p.num_edges()},
                  {"dual_dim", p.dual_dim()},
                  {"primal_dim", p.primal_dim()}};
  j["scheduler"] = SchedulerName(c.scheduler);
  Json rules = Json::array();
  for (const StepsizeRule& rule : c.stepsize) rules.push_back(RuleName(rule));
  j["stepsize"] = {{"rules", rules},
                   {"clock", c.clock == StepsizeClock::kLocal ? "local" : "global"}};
  j["noise"] = {{"kind", NoiseName(c.noise)},
                {"second_moment_bound", SecondMomentBound(c.noise, p.dual_dim())}};
  if (c.reference) {
    const Reference& ref = *c.reference;
    j["reference"] = {{"method", ref.method},
                      {"f_star", ref.f_star},
                      {"q_star", ref.q_star},
                      {"x_star", VectorJson(ref.x_star)}};
    if (ref.lambda_star) j["reference"]["lambda_star"] = VectorJson(*ref.lambda_star);
  } else {
    j["reference"] = nullptr;
  }

  Json fin;
  fin["Q"] = t.q[last];
  fin["gap"] = t.has_reference ? Json(t.gap[last]) : Json(nullptr);
  fin["best_gap"] = t.has_reference ? Json(t.best_gap[last]) : Json(nullptr);
  fin["residual"] = t.residual[last];
  fin["dist_to_lambda_star"] = t.has_lambda_star ? Json(t.dist[last]) : Json(nullptr);
  fin["lambda"] = VectorJson(o.result.state.lambda);
  Json gamma = Json::array();
  for (int64_t g : o.result.state.gamma) gamma.push_back(g);
  fin["gamma"] = gamma;
  if (!t.witness.empty() && p.IsScalarConsensus()) {
    fin["consensus_spread"] = ConsensusSpread(t, p).back();
  }
  j["final"] = fin;

  Json mon;
  mon["delta_hat"] = r.delta_applicable ? Json(r.delta_hat) : Json(nullptr);
  mon["c_hat"] = r.c_hat ? Json(*r.c_hat) : Json(nullptr);
  mon["c_hat_step"] = r.c_hat_step;
  mon["G_hat"] = r.g_hat;
  mon["G_hat_step"] = r.g_hat_step;
  Json p6;
  p6["applicable"] = r.best_value_bound.applicable;
  if (r.best_value_bound.applicable) {
    p6["m1"] = r.best_value_bound.m1;
    p6["R_squared"] = r.best_value_bound.r_squared;
    p6["K"] = r.best_value_bound.k_noise;
    p6["G"] = r.best_value_bound.g;
    p6["holds"] = r.best_value_bound.first_violation < 0;
    p6["first_violation"] = r.best_value_bound.first_violation;
    p6["min_relative_slack"] = r.best_value_bound.min_relative_slack;
  } else {
    p6["skipped"] = r.best_value_bound.skipped_reason;
  }
  mon["bound_best_value_bound"] = p6;
  if (!r.rate_product.empty()) {
    mon["rate_rate_product"] = {{"final", r.rate_product.back()},
                         {"running_min", r.rate_product_running_min.back()}};
  }
  if (o.rate) {
    mon["rate_estimate"] = {{"b_final", o.rate->b.back()},
                            {"scaled_final", o.rate->scaled.back()},
                            {"log_slope", o.rate->log_slope},
                            {"loglog_slope", o.rate->loglog_slope},
                            {"clipped", o.rate->clipped},
                            {"non_convergent", o.rate->non_convergent}};
  }
  mon["assumption_flags"] = r.violations;
  std::vector<std::string> notes = o.notes;
  notes.insert(notes.end(), r.notes.begin(), r.notes.end());
  mon["notes"] = notes;
  j["monitor"] = mon;
  return j.dump(2) + "\n";
}

ExperimentOutcome RunExperiment(const ExperimentSpec& spec,
                                const ExperimentOptions& options) {
  ValidateExperiment(spec);
  ExperimentOutcome out;
  out.output_dir = ResolveOutputDir(spec, options);
  const std::filesystem::path dir(out.output_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) ConfigError("cannot create output directory " + out.output_dir);

  std::vector<const VariantSpec*> variants;
  for (const VariantSpec& v : spec.variants) variants.push_back(&v);
  if (variants.empty()) variants.push_back(nullptr);

  bool violated = false;
  for (const VariantSpec* v : variants) {
    VariantOutcome o;
    o.name = v ? v->name : spec.name;
    o.config = BuildRunConfig(spec, v, options);
    const ProblemInstance& p = *o.config.problem;
    const RankReport rank = CheckConstraintRank(p);
    if (!rank.full_rank) {
      o.notes.push_back("constraint matrix rank " + std::to_string(rank.rank) + " < " +
                        std::to_string(rank.dual_dim) +
                        ": dual not radially unbounded, optimal set unbounded");
    }
    if (spec.reference && !o.config.reference) {
      o.notes.push_back("no reference: problem is not connected scalar consensus");
    }
    if (o.config.reference) {
      const double z = o.config.reference->x_star.size() ? o.config.reference->x_star[0] : 0;
      for (int i = 0; i < p.num_agents(); ++i) {
        const Interval& b = p.local(i).box[0];
        if (z <= b.lo || z >= b.hi) {
          o.notes.push_back("reference optimum on the box boundary of agent " +
                            std::to_string(i + 1));
          break;
        }
      }
    }
    if (options.log) *options.log << "running " << o.name << " (" << o.config.iterations
                                  << " steps)\n";
    o.result = Run(o.config);
    o.report = Monitor(o.result.trace, o.config);
    const auto q = RuleExponent(o.config.stepsize.front());
    if (o.result.trace.has_reference && q) o.rate = EstimateRate(o.result.trace, *q);
    violated = violated || !o.report.violations.empty();

    const auto trace_path = dir / (o.name + ".trace.csv");
    {
      std::ofstream f(trace_path, std::ios::binary);
      if (!f) ConfigError("cannot write " + trace_path.string());
      WriteTraceCsv(o.result.trace, f);
    }
    const auto summary_path = dir / (o.name + ".summary.json");
    WriteFile(summary_path, SummaryJson(o));
    out.files.push_back(trace_path.string());
    out.files.push_back(summary_path.string());
    if (o.config.record_lambda) {
      const auto path = dir / (o.name + ".lambda.csv");
      std::ostringstream s;
      WriteLambdaCsv(o.result.trace, s);
      WriteFile(path, s.str());
      out.files.push_back(path.string());
    }
    if (o.config.record_witness) {
      const auto path = dir / (o.name + ".witness.csv");
      std::ostringstream s;
      WriteWitnessCsv(o.result.trace, s);
      WriteFile(path, s.str());
      out.files.push_back(path.string());
    }
    if (options.log) {
      for (const std::string& s : o.report.violations) *options.log << "  " << s << "\n";
    }
    out.variants.push_back(std::move(o));
  }

  // Plot data: |Q* - Q| per variant at the kept rows of the first variant.
  std::string text = "k";
  for (const VariantOutcome& o : out.variants) text += "," + o.name;
  text += '\n';
  const Trace& first = out.variants.front().result.trace;
  for (int64_t row = 0; row < first.rows(); ++row) {
    const int64_t k = first.row_k[row];
    text += std::to_string(k);
    for (const VariantOutcome& o : out.variants) {
      text += ',';
      const Trace& t = o.result.trace;
      if (t.has_reference && k <= t.iterations()) text += FormatDouble(std::abs(t.gap[k]));
    }
    text += '\n';
  }
  const auto gap_path = dir / "gap_vs_iter.csv";
  WriteFile(gap_path, text);
  out.files.push_back(gap_path.string());

  out.exit_code = violated && !options.allow_violations ? kExitViolation : kExitOk;
  return out;
}

ExperimentSpec GenerateNumericalExample(int num_hinge, int num_entropy,
                                   const std::string& graph_kind, uint64_t seed,
                                   bool regularize) {
  Require(num_hinge >= 0 && num_entropy >= 0, "agent counts must be >= 0");
  const int n = num_hinge + num_entropy;
  Require(n >= 1, "need at least one agent");
  ExperimentSpec s;
  s.name = "example_h" + std::to_string(num_hinge) + "_e" + std::to_string(num_entropy) +
           "_" + graph_kind;
  s.graph.agents = n;
  if (graph_kind == "path") {
    s.graph.kind = "path";
  } else if (graph_kind == "rgg") {
    s.graph.kind = "rgg";
    // Edge density of the 50-agent, 358-edge reference network.
    const int max_edges = n * (n - 1) / 2;
    s.graph.target_edges = std::max(
        std::min(n - 1, max_edges),
        static_cast<int>(std::lround(358.0 / 1225.0 * max_edges)));
    if (max_edges == 0) {
      s.graph.kind = "path";
      s.graph.target_edges = 0;
    } else {
      uint64_t placement = seed;
      while (!BuildTopology(GraphSpec{"rgg", n, {}, 0, s.graph.target_edges, placement})
                  .IsConnected()) {
        ++placement;
      }
      s.graph.seed = placement;
    }
  } else {
    Require(false, "graph kind must be path or rgg");
  }

  Rng rng(HashKeys({seed, 0x5ec6ULL}));
  std::vector<double> base;
  for (int i = 0; i < n; ++i) {
    LocalProblem l;
    if (i < num_hinge) {
      const double w = rng.Uniform(0.2, 1.0);
      const double a = rng.Uniform(2.0, 8.0);
      l.box = {Interval{-50, 50}};
      l.atoms = {HingeAtom{0, w, a, 0.0}};
      l.regularizer = regularize ? 0.005 : 0.0;
    } else {
      const double p = rng.Uniform(1.0, 5.0);
      l.box = {Interval{1e-4, 50}};
      l.atoms = {EntropyAtom{0, p}};
    }
    base.push_back(rng.Uniform(0.5, 1.0));
    s.problem.agents.push_back(l);
  }
  s.scheduler = AdaptiveCounterSchedule{base, 0.7, 10};
  s.stepsize = StepsizeSpec{{ClosedFormShift{0.15, 0.51}}, StepsizeClock::kLocal};
  s.noise = NoNoise{};
  s.run.iterations = 100000;
  s.run.seed = seed;
  s.output.stride = 100;
  s.output.channels = {"Q", "gap", "residual", "witness"};
  s.variants = {
      VariantSpec{"sync", std::nullopt, SynchronousSchedule{}, std::nullopt, std::nullopt},
      VariantSpec{"async-global", std::nullopt, std::nullopt,
                  StepsizeSpec{{ClosedFormShift{0.15, 0.51}}, StepsizeClock::kGlobal},
                  std::nullopt},
      VariantSpec{"async-local", std::nullopt, std::nullopt, std::nullopt, std::nullopt},
  };
  return s;
}

int CertifyExperiment(const ExperimentSpec& spec, std::ostream& out) {
  ValidateExperiment(spec);
  const Topology topology = BuildTopology(spec.graph);
  const ProblemInstance p = BuildProblem(topology, spec.problem);
  Json j;
  j["name"] = spec.name;
  if (!p.IsScalarConsensus() || !topology.IsConnected()) {
    j["reference"] = nullptr;
    j["note"] = "no reference: problem is not connected scalar consensus";
    out << j.dump(2) << "\n";
    return kExitOk;
  }
  const Reference ref = ComputeReference(p);
  j["reference"] = {{"method", ref.method}, {"f_star", ref.f_star},
                    {"x_star", VectorJson(ref.x_star)}};
  int code = kExitOk;
  if (ref.lambda_star) {
    const DualValue q = EvaluateDual(p, *ref.lambda_star);
    const Vector g = ConstraintResidual(p, q.witness);
    j["lambda_star"] = VectorJson(*ref.lambda_star);
    j["Q_lambda_star"] = q.value;
    j["supergradient_norm"] = g.norm();
    try {
      const GridCertificate cert = GridCertifyReport(p, *ref.lambda_star, 1.0, 0.05);
      j["grid"] = {{"radius", 1.0}, {"step", 0.05}, {"points", cert.points},
                   {"best_value", cert.best_value}, {"certified", cert.certified}};
      if (!cert.certified) code = kExitOracle;
    } catch (const Error& e) {
      j["grid"] = {{"skipped", e.what()}};
    }
  }
  out << j.dump(2) << "\n";
  return code;
}

}  // namespace dualdec
