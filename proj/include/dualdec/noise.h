#ifndef DUALDEC_NOISE_H_
#define DUALDEC_NOISE_H_

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dualdec/problem.h"

namespace dualdec {

struct NoNoise {
  friend bool operator==(const NoNoise&, const NoNoise&) = default;
};

enum class NoiseShape { kUniform, kBell };

// Symmetric, bounded, zero-mean draws on [-half_width, half_width] per
// coordinate. kBell is the mean of four uniforms (same support).
struct ZeroMeanNoise {
  NoiseShape shape = NoiseShape::kUniform;
  double half_width = 0;
  friend bool operator==(const ZeroMeanNoise&, const ZeroMeanNoise&) = default;
};

// beta + zero-mean core. The bias is either an explicit constant vector
// (length = dual dimension) or, when `bias` is empty, `epsilon` along the
// normalized all-ones direction, so |beta| = epsilon.
struct BiasedNoise {
  std::vector<double> bias;
  double epsilon = 0;
  ZeroMeanNoise core;
  friend bool operator==(const BiasedNoise&, const BiasedNoise&) = default;
};

using NoiseSpec = std::variant<NoNoise, ZeroMeanNoise, BiasedNoise>;

std::string NoiseName(const NoiseSpec& spec);
void ValidateNoise(const NoiseSpec& spec, int dual_dim);

// Error vector e_{k+1}. Each coordinate is keyed by (seed, k, coordinate), so
// draws do not depend on which edges consume them.
Vector SampleError(const NoiseSpec& spec, int64_t k, uint64_t seed,
                   int dual_dim);
void SampleErrorInto(const NoiseSpec& spec, int64_t k, uint64_t seed,
                     std::span<double> out);

// Bias beta_k (constant in k for the supported specs).
Vector NoiseBias(const NoiseSpec& spec, int dual_dim);
// K with E|e - beta|^2 <= K: dual_dim * half_width^2.
double SecondMomentBound(const NoiseSpec& spec, int dual_dim);
// Pathwise bound |e| <= |beta| + half_width sqrt(dual_dim).
double SupportBound(const NoiseSpec& spec, int dual_dim);
bool IsZeroMean(const NoiseSpec& spec);

}  // namespace dualdec

#endif  // DUALDEC_NOISE_H_
