#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace indtime {

/// Philox4x32-10 counter-based block cipher (Salmon et al., SC'11).
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key);

/// Identifies one reproducible pseudo-random stream.
///
/// The master seed becomes the Philox key and the stream index occupies the
/// upper half of the counter, so distinct (master, stream) pairs never share
/// a counter value; the lower half counts blocks within the stream (2^64
/// blocks of 128 bits each).
struct SeedStream {
  std::uint64_t master = 0;
  std::uint64_t stream = 0;

  /// Stream index reserved for a sub-purpose (sampler, reference, permutation, ...).
  /// Keeps purposes in disjoint index ranges: domain occupies the top 16 bits.
  [[nodiscard]] static SeedStream of(std::uint64_t master, std::uint16_t domain,
                                     std::uint64_t index) {
    return {master, (static_cast<std::uint64_t>(domain) << 48) | (index & ((1ULL << 48) - 1))};
  }

  friend bool operator==(const SeedStream&, const SeedStream&) = default;
};

/// Stream domains used across the library.
namespace seed_domain {
inline constexpr std::uint16_t paths = 1;
inline constexpr std::uint16_t reference = 2;
inline constexpr std::uint16_t permutation = 3;
inline constexpr std::uint16_t terminal = 4;
inline constexpr std::uint16_t synthetic = 5;
inline constexpr std::uint16_t pilot = 6;
inline constexpr std::uint16_t reference_terminal = 7;
}  // namespace seed_domain

/// Generator over one SeedStream. Satisfies UniformRandomBitGenerator.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(SeedStream seed) noexcept : seed_(seed) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1).
  double uniform_open() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }
  /// Standard normal (Marsaglia polar method, second variate cached).
  double normal() noexcept;
  double exponential(double rate) noexcept;
  /// Uniform integer on [0, n).
  std::uint64_t below(std::uint64_t n) noexcept;

  [[nodiscard]] SeedStream seed() const noexcept { return seed_; }

 private:
  void refill() noexcept;

  SeedStream seed_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int available_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace indtime
