#include "dualdec/noise.h"

#include <cmath>

#include "dualdec/errors.h"
#include "dualdec/random.h"

namespace dualdec {

namespace {

double CenteredDraw(const ZeroMeanNoise& core, uint64_t seed, int64_t k,
                    int coord) {
  if (core.half_width == 0) return 0;
  const uint64_t key = HashKeys({seed, 0x6e015eULL,
                                 static_cast<uint64_t>(k),
                                 static_cast<uint64_t>(coord)});
  if (core.shape == NoiseShape::kUniform) {
    return core.half_width * (2 * UnitDouble(key) - 1);
  }
  double sum = 0;
  uint64_t h = key;
  for (int i = 0; i < 4; ++i) {
    h = Mix64(h);
    sum += 2 * UnitDouble(h) - 1;
  }
  return core.half_width * (sum / 4);
}

const ZeroMeanNoise* Core(const NoiseSpec& spec) {
  if (const auto* z = std::get_if<ZeroMeanNoise>(&spec)) return z;
  if (const auto* b = std::get_if<BiasedNoise>(&spec)) return &b->core;
  return nullptr;
}

}  // namespace

std::string NoiseName(const NoiseSpec& spec) {
  switch (spec.index()) {
    case 0: return "none";
    case 1: return "zero_mean";
    default: return "biased";
  }
}

void ValidateNoise(const NoiseSpec& spec, int dual_dim) {
  if (const ZeroMeanNoise* core = Core(spec)) {
    Require(core->half_width >= 0, "noise half-width must be >= 0");
  }
  if (const auto* b = std::get_if<BiasedNoise>(&spec)) {
    if (!b->bias.empty()) {
      Require(static_cast<int>(b->bias.size()) == dual_dim,
              "bias vector length must equal the dual dimension");
    } else {
      Require(b->epsilon >= 0, "bias magnitude must be >= 0");
    }
  }
}

Vector NoiseBias(const NoiseSpec& spec, int dual_dim) {
  Vector beta = Vector::Zero(dual_dim);
  if (const auto* b = std::get_if<BiasedNoise>(&spec)) {
    if (!b->bias.empty()) {
      for (int r = 0; r < dual_dim; ++r) beta[r] = b->bias[r];
    } else if (dual_dim > 0) {
      beta.setConstant(b->epsilon / std::sqrt(static_cast<double>(dual_dim)));
    }
  }
  return beta;
}

void SampleErrorInto(const NoiseSpec& spec, int64_t k, uint64_t seed,
                     std::span<double> out) {
  const int n = static_cast<int>(out.size());
  if (std::holds_alternative<NoNoise>(spec)) {
    std::fill(out.begin(), out.end(), 0.0);
    return;
  }
  const ZeroMeanNoise* core = Core(spec);
  for (int r = 0; r < n; ++r) out[r] = CenteredDraw(*core, seed, k, r);
  if (const auto* b = std::get_if<BiasedNoise>(&spec)) {
    const Vector beta = NoiseBias(spec, n);
    (void)b;
    for (int r = 0; r < n; ++r) out[r] += beta[r];
  }
}

Vector SampleError(const NoiseSpec& spec, int64_t k, uint64_t seed,
                   int dual_dim) {
  Vector e(dual_dim);
  SampleErrorInto(spec, k, seed, std::span<double>(e.data(), e.size()));
  return e;
}

double SecondMomentBound(const NoiseSpec& spec, int dual_dim) {
  const ZeroMeanNoise* core = Core(spec);
  if (!core) return 0;
  return dual_dim * core->half_width * core->half_width;
}

double SupportBound(const NoiseSpec& spec, int dual_dim) {
  const ZeroMeanNoise* core = Core(spec);
  if (!core) return 0;
  return NoiseBias(spec, dual_dim).norm() +
         core->half_width * std::sqrt(static_cast<double>(dual_dim));
}

bool IsZeroMean(const NoiseSpec& spec) {
  if (const auto* b = std::get_if<BiasedNoise>(&spec)) {
    return b->bias.empty() ? b->epsilon == 0
                           : std::all_of(b->bias.begin(), b->bias.end(),
                                         [](double v) { return v == 0; });
  }
  return true;
}

}  // namespace dualdec
