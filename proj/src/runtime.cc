#include "dualdec/runtime.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "dualdec/errors.h"

namespace dualdec {

void ValidateRunConfig(const RunConfig& config) {
  Require(config.problem != nullptr, "run config has no problem");
  const ProblemInstance& p = *config.problem;
  Require(config.iterations >= 1, "iterations must be >= 1");
  Require(config.stride >= 1, "stride must be >= 1");
  Require(config.stepsize.size() == 1 ||
              static_cast<int>(config.stepsize.size()) == p.num_edges(),
          "need one stepsize rule, or one per edge");
  for (const StepsizeRule& r : config.stepsize) ValidateRule(r);
  ValidateScheduler(config.scheduler, p.topology());
  ValidateNoise(config.noise, p.dual_dim());
  if (config.lambda0) {
    RequireDims(config.lambda0->size() == p.dual_dim(),
                "lambda0 dimension mismatch");
  }
  if (config.reference && config.reference->lambda_star) {
    RequireDims(config.reference->lambda_star->size() == p.dual_dim(),
                "reference lambda* dimension mismatch");
  }
}

std::vector<StepsizeRule> EdgeRules(const RunConfig& config) {
  const int m = config.problem->num_edges();
  if (config.stepsize.size() == 1) {
    return std::vector<StepsizeRule>(m, config.stepsize.front());
  }
  return config.stepsize;
}

std::vector<int64_t> Trace::GammaAt(int64_t k) const {
  std::vector<int64_t> g(num_edges, 0);
  for (int64_t i = 1; i <= k; ++i) {
    const uint8_t* m = mask(i);
    for (int e = 0; e < num_edges; ++e) g[e] += m[e];
  }
  return g;
}

Vector Trace::LambdaRow(int64_t row) const {
  Require(!lambda.empty(), "trace has no lambda channel");
  return Eigen::Map<const Vector>(lambda.data() + row * dual_dim, dual_dim);
}

Vector Trace::WitnessRow(int64_t row) const {
  Require(!witness.empty(), "trace has no witness channel");
  return Eigen::Map<const Vector>(witness.data() + row * primal_dim,
                                  primal_dim);
}

RunResult Run(const RunConfig& config) {
  ValidateRunConfig(config);
  const ProblemInstance& problem = *config.problem;
  const std::vector<StepsizeRule> rules = EdgeRules(config);
  const int m = problem.num_edges();
  const int n = problem.dual_dim();
  const int64_t iters = config.iterations;

  RunResult out;
  Trace& t = out.trace;
  t.num_edges = m;
  t.dual_dim = n;
  t.primal_dim = problem.primal_dim();
  t.stride = config.stride;
  const Reference* ref = config.reference ? &*config.reference : nullptr;
  t.has_reference = ref != nullptr;
  t.has_lambda_star = ref && ref->lambda_star.has_value();
  t.q_star = ref ? ref->q_star : 0;

  const size_t steps = static_cast<size_t>(iters + 1);
  t.masks.assign(steps * m, 0);
  t.q.reserve(steps);
  t.residual.reserve(steps);
  t.step_alpha.reserve(steps);
  t.noise_norm.assign(steps, 0);
  if (ref) {
    t.gap.reserve(steps);
    t.best_gap.reserve(steps);
  }
  if (t.has_lambda_star) t.dist.reserve(steps);

  out.state = DualState::Initial(problem, rules, config.lambda0);
  DualState& s = out.state;
  Scheduler scheduler(config.scheduler, problem.topology(), config.seed);
  SupergradientOracle oracle(problem, config.execution);
  Vector error(n);
  double best_q = -kInf;

  for (int64_t k = 0;; ++k) {
    const Supergradient* sg;
    try {
      sg = &oracle.Evaluate(s.lambda);
    } catch (OracleFailure& f) {
      f.set_step(k);
      throw;
    }
    t.q.push_back(sg->dual_value);
    t.residual.push_back(sg->g.norm());
    t.step_alpha.push_back(
        s.alpha.empty() ? 0.0 : *std::max_element(s.alpha.begin(), s.alpha.end()));
    best_q = std::max(best_q, sg->dual_value);
    if (ref) {
      t.gap.push_back(ref->q_star - sg->dual_value);
      t.best_gap.push_back(ref->q_star - best_q);
    }
    if (t.has_lambda_star) t.dist.push_back((s.lambda - *ref->lambda_star).norm());
    if (k % config.stride == 0 || k == iters) {
      t.row_k.push_back(k);
      t.alpha.insert(t.alpha.end(), s.alpha.begin(), s.alpha.end());
      t.gamma.insert(t.gamma.end(), s.gamma.begin(), s.gamma.end());
      if (config.record_lambda) {
        t.lambda.insert(t.lambda.end(), s.lambda.data(),
                        s.lambda.data() + n);
      }
      if (config.record_witness) {
        t.witness.insert(t.witness.end(), sg->witness.data(),
                         sg->witness.data() + sg->witness.size());
      }
    }
    if (k == iters) break;

    const Mask mask = scheduler.Next();
    SampleErrorInto(config.noise, k, config.seed,
                    std::span<double>(error.data(), n));
    double consumed = 0;
    for (int e = 0; e < m; ++e) {
      if (!mask[e]) continue;
      const int lo = problem.lambda_offset(e);
      for (int r = 0; r < problem.edge_dim(e); ++r) {
        consumed += error[lo + r] * error[lo + r];
      }
    }
    t.noise_norm[k + 1] = std::sqrt(consumed);
    std::copy(mask.begin(), mask.end(), t.masks.begin() + (k + 1) * m);
    ApplyAsyncUpdate(problem, s, sg->g, mask, error, rules, config.clock);
  }
  return out;
}

std::string FormatDouble(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void WriteTraceCsv(const Trace& t, std::ostream& out) {
  out << "k,mask,Q,gap,best_gap,residual";
  for (int e = 1; e <= t.num_edges; ++e) out << ",alpha_" << e;
  for (int e = 1; e <= t.num_edges; ++e) out << ",gamma_" << e;
  out << '\n';
  std::string line;
  for (int64_t row = 0; row < t.rows(); ++row) {
    const int64_t k = t.row_k[row];
    line.clear();
    line += std::to_string(k);
    line += ',';
    const uint8_t* m = t.mask(k);
    for (int e = 0; e < t.num_edges; ++e) line += m[e] ? '1' : '0';
    line += ',';
    line += FormatDouble(t.q[k]);
    line += ',';
    if (t.has_reference) line += FormatDouble(t.gap[k]);
    line += ',';
    if (t.has_reference) line += FormatDouble(t.best_gap[k]);
    line += ',';
    line += FormatDouble(t.residual[k]);
    for (int e = 0; e < t.num_edges; ++e) {
      line += ',';
      line += FormatDouble(t.alpha[row * t.num_edges + e]);
    }
    for (int e = 0; e < t.num_edges; ++e) {
      line += ',';
      line += std::to_string(t.gamma[row * t.num_edges + e]);
    }
    line += '\n';
    out << line;
  }
}

namespace {

void WriteRowsCsv(const Trace& t, const std::vector<double>& data, int width,
                  const char* prefix, std::ostream& out) {
  Require(static_cast<int64_t>(data.size()) == t.rows() * width,
          std::string("trace has no ") + prefix + " channel");
  std::string line = "k";
  for (int c = 1; c <= width; ++c) line += "," + std::string(prefix) + std::to_string(c);
  out << line << '\n';
  for (int64_t row = 0; row < t.rows(); ++row) {
    line = std::to_string(t.row_k[row]);
    for (int c = 0; c < width; ++c) {
      line += ',';
      line += FormatDouble(data[row * width + c]);
    }
    out << line << '\n';
  }
}

}  // namespace

void WriteLambdaCsv(const Trace& t, std::ostream& out) {
  WriteRowsCsv(t, t.lambda, t.dual_dim, "lambda_", out);
}

void WriteWitnessCsv(const Trace& t, std::ostream& out) {
  WriteRowsCsv(t, t.witness, t.primal_dim, "x_", out);
}

}  // namespace dualdec
