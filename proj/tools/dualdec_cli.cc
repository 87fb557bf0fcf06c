// dualdec: run experiment specs, generate numerical-example configs, certify
// references.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "dualdec/errors.h"
#include "dualdec/experiment.h"

namespace {

using namespace dualdec;

std::vector<std::string> SplitChannels(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (item == "λ") item = "lambda";
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

int ExitCodeFor(const Error& e) {
  switch (e.kind()) {
    case ErrorKind::kOracleFailure: return kExitOracle;
    case ErrorKind::kAssumptionViolation: return kExitViolation;
    default: return kExitConfig;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Asynchronous dual decomposition simulator"};
  app.require_subcommand(1);

  std::string spec_path;
  std::optional<uint64_t> seed;
  std::optional<int64_t> iters;
  std::optional<std::string> out_dir;
  std::optional<std::string> channels;
  bool allow = false;

  auto* run = app.add_subcommand("run", "Run every variant of an experiment spec");
  run->add_option("spec", spec_path, "Experiment JSON file")->required();
  run->add_option("--seed", seed, "Override the run seed");
  run->add_option("--iters", iters, "Override the iteration count")
      ->check(CLI::PositiveNumber);
  run->add_option("--out", out_dir, "Output directory (default: $DUALDEC_OUT_DIR or ./out)");
  run->add_flag("--allow-violations", allow, "Exit 0 even when an assumption is flagged");
  run->add_option("--channels", channels, "Trace channels, e.g. lambda,Q,gap,residual,witness");

  int hinge = 5, entropy = 45;
  std::string graph = "path";
  uint64_t gen_seed = 1;
  bool no_reg = false;
  std::optional<std::string> gen_out;
  auto* gen = app.add_subcommand("gen-example", "Write a numerical-example experiment spec");
  gen->add_option("--hinge", hinge, "Hinge agents")->check(CLI::NonNegativeNumber);
  gen->add_option("--entropy", entropy, "Entropy agents")->check(CLI::NonNegativeNumber);
  gen->add_option("--graph", graph, "path or rgg")->check(CLI::IsMember({"path", "rgg"}));
  gen->add_option("--seed", gen_seed, "Sampling seed");
  gen->add_flag("--no-regularizer", no_reg, "Drop the 0.005 x^2 term on hinge agents");
  gen->add_option("--iters", iters, "Iteration count written into the generated file")
      ->check(CLI::PositiveNumber);
  gen->add_option("-o,--output", gen_out, "Spec file (default: stdout)");

  auto* cert = app.add_subcommand("certify", "Compute the reference and grid-certify lambda*");
  cert->add_option("spec", spec_path, "Experiment JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run) {
      const ExperimentSpec spec = LoadExperiment(spec_path);
      ExperimentOptions opt;
      opt.out_dir = out_dir;
      opt.allow_violations = allow;
      opt.seed = seed;
      opt.iterations = iters;
      if (channels) opt.channels = SplitChannels(*channels);
      opt.log = &std::cerr;
      const ExperimentOutcome outcome = RunExperiment(spec, opt);
      for (const std::string& f : outcome.files) std::cout << f << "\n";
      if (outcome.exit_code == kExitViolation) {
        std::cerr << "assumption violations flagged (see summaries); "
                     "pass --allow-violations to accept\n";
      }
      return outcome.exit_code;
    }
    if (*gen) {
      ExperimentSpec spec = GenerateNumericalExample(hinge, entropy, graph, gen_seed, !no_reg);
      if (iters) spec.run.iterations = *iters;
      const std::string text = SerializeExperiment(spec);
      if (gen_out) {
        std::ofstream f(*gen_out);
        if (!f) {
          std::cerr << "cannot write " << *gen_out << "\n";
          return kExitConfig;
        }
        f << text;
      } else {
        std::cout << text;
      }
      return kExitOk;
    }
    if (*cert) {
      return CertifyExperiment(LoadExperiment(spec_path), std::cout);
    }
  } catch (const OracleFailure& e) {
    std::cerr << "oracle failure at step " << e.step() << ", agent " << e.agent() + 1
              << ": " << e.what() << "\n";
    return kExitOracle;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return ExitCodeFor(e);
  }
  return kExitOk;
}
