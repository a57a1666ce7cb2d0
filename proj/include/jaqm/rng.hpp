#pragma once

// Counter-based random streams (Philox4x32-10, Salmon et al., SC'11).
//
// A stream is addressed by (seed, path, substream); the 128-bit counter is
// (block_lo, block_hi, path, substream) and the key is the 64-bit seed. Two
// streams with different addresses never share a counter, so paths can be
// generated in any order on any worker and still reproduce bit for bit.

#include <array>
#include <cstdint>
#include <limits>

namespace jaqm {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

/// Ten rounds of Philox4x32 on one counter block.
PhiloxCounter philox4x32_10(PhiloxCounter counter, PhiloxKey key) noexcept;

enum class Substream : std::uint32_t {
  jumps = 1,
  brownian = 2,
};

class CounterStream {
 public:
  using result_type = std::uint32_t;

  CounterStream(std::uint64_t seed, std::uint64_t path, Substream substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept;
  double normal() noexcept;
  /// Exponential with the given rate.
  double exponential(double rate) noexcept;

  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() noexcept;

  PhiloxKey key_;
  std::uint32_t path_;
  std::uint32_t substream_;
  std::uint64_t block_ = 0;
  PhiloxCounter buffer_{};
  int next_ = 4;
  bool has_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace jaqm
