#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace prosumer {

// Seeded stream with a platform-independent mapping from engine output to
// uniforms and categorical draws (the std distributions are not specified
// bit-for-bit across standard libraries).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Stream keyed by (seed, tag) so independent consumers never share draws.
  static RandomStream derived(std::uint64_t seed, std::string_view tag);
  static RandomStream derived(std::uint64_t seed, std::uint64_t index);

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Index drawn with the given weights (which sum to ~1) by inverse CDF.
  int categorical(std::span<const double> weights);

 private:
  std::mt19937_64 engine_;
};

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace prosumer
