#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace taylorlaw {

// Philox4x64-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Pure: the same (counter, key) always maps to the same
// four output words.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

// Independent streams are keyed by (seed, purpose, index). The purpose tag
// keeps, say, subsample selection from reusing the uniforms that generated
// the data being subsampled.
enum class StreamTag : std::uint16_t {
  kSample = 1,
  kSubsample = 2,
  kBootstrap = 3,
  kGraph = 4,
  kNodeValues = 5,
  kProbe = 6,
  kPairs = 7,
};

// SplitMix64 finaliser applied to (seed, salt); used to derive child seeds
// for nested randomised procedures.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based generator. Stream (seed, tag, index) is the Philox key; the
// block counter walks 0, 1, 2, ... so streams never overlap and any stream
// can be created in O(1) on any thread.
class Rng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kMaxIndex = (std::uint64_t{1} << 48) - 1;

  explicit Rng(std::uint64_t seed, StreamTag tag = StreamTag::kSample,
               std::uint64_t index = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  // 53-bit uniform on [0, 1).
  double uniform() noexcept;
  // 53-bit uniform on (0, 1); never returns an endpoint.
  double uniform_open() noexcept;
  // Standard normal by the Box-Muller transform (pairs are cached).
  double normal() noexcept;
  // Unit-rate exponential.
  double exponential() noexcept;
  // Uniform integer on [0, bound); bound > 0. Lemire's nearly-divisionless
  // rejection, so the result is exactly uniform.
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  Philox4x64::Key key_;
  std::uint64_t block_index_ = 0;
  Philox4x64::Counter buffer_{};
  unsigned position_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace taylorlaw
