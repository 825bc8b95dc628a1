#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <span>

namespace ecmmd {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). A stream
// is identified by (seed, domain, a, b); draws within a stream are indexed by
// a block counter, so any stream can be reproduced without replaying others.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer; used to derive child seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Child seed for replicate `index` of a Monte Carlo run seeded by `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Stream domains keep draws for different purposes disjoint.
enum class StreamDomain : std::uint32_t {
  Resample = 1,       // (unit u, slot m) draws from a conditional sampler
  Covariate = 2,      // generator covariates
  Response = 3,       // generator responses
  CalibrationDraw = 4,
  Jitter = 5,
};

/// One independent random stream. Satisfies UniformRandomBitGenerator.
class RngStream {
 public:
  using result_type = std::uint32_t;

  RngStream(std::uint64_t seed, StreamDomain domain, std::uint32_t a, std::uint32_t b) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;
  double normal(double mean, double sd) noexcept { return mean + sd * normal(); }
  double gamma(double shape) noexcept;
  /// Beta(a, b) as G_a / (G_a + G_b).
  double beta(double a, double b) noexcept;
  bool bernoulli(double p) noexcept { return uniform() < p; }
  /// Index drawn with the given (nonnegative, normalized) probabilities.
  std::size_t categorical(std::span<const double> probs) noexcept;

 private:
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  unsigned used_ = 4;
};

}  // namespace ecmmd
