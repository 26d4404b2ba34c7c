#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace hdp {

/// Identifies one reproducible random stream: the master seed of a run and the
/// index of the ensemble member (path) that consumes it.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;

  /// Derives an independent stream for a sub-task of this stream (e.g. the
  /// bridge fill of a refinement). The result never collides with the
  /// stream_index range of a plain ensemble.
  [[nodiscard]] SeedSpec substream(std::uint64_t tag) const;

  friend bool operator==(const SeedSpec&, const SeedSpec&) = default;
};

/// Philox4x32-10 counter-based generator.
///
/// The key is the master seed, the upper half of the 128-bit counter is the
/// stream index and the lower half counts blocks. Every (master_seed,
/// stream_index) pair therefore addresses its own sequence, and the output of
/// one stream does not depend on how many other streams were drawn before it
/// or on which thread drew them.
class Philox4x32 {
public:
  using result_type = std::uint32_t;
  using Block = std::array<std::uint32_t, 4>;

  explicit Philox4x32(SeedSpec seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  /// Raw bijection: encrypts `counter` under `key`.
  static Block encrypt(Block counter, std::array<std::uint32_t, 2> key);

private:
  std::array<std::uint32_t, 2> key_;
  Block counter_;
  Block buffer_{};
  unsigned next_ = 4;
};

/// Per-path random source: one Philox stream plus the distribution state that
/// must travel with it.
class RandomStream {
public:
  explicit RandomStream(SeedSpec seed) : engine_(seed) {}

  double gaussian() { return normal_(engine_); }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() {
    const std::uint64_t hi = engine_();
    const std::uint64_t lo = engine_();
    const std::uint64_t bits = ((hi << 32) | lo) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  }

private:
  Philox4x32 engine_;
  std::normal_distribution<double> normal_;
};

}  // namespace hdp
