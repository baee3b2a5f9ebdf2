#pragma once

#include <array>
#include <cstdint>

namespace apmarkov {

/// Philox4x32-10 block function (Salmon et al., Random123). Maps a 128-bit
/// counter and a 64-bit key to 128 pseudo-random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter ctr, Key key) noexcept;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Key derivation for substreams:
///   key64 = splitmix64(splitmix64(seed) ^ stream)
/// low 32 bits -> key[0], high 32 bits -> key[1].
Philox4x32::Key derive_key(std::uint64_t seed, std::uint64_t stream) noexcept;

/// Sequential view over a Philox substream. The counter layout is
/// {block_lo, block_hi, lane_lo, lane_hi}: (seed, stream) selects the key and
/// `lane` selects a disjoint counter range under that key.
///
/// uniform() returns (u64 >> 11 + 0.5) * 2^-53, strictly inside (0,1);
/// normal() uses the Box–Muller pair on two consecutive uniforms.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t stream, std::uint64_t lane = 0) noexcept;

  std::uint64_t next_u64() noexcept;
  double uniform() noexcept;
  double normal() noexcept;

  /// Uniform integer in [0, n) by multiply-shift on 64 bits; n > 0.
  std::uint64_t below(std::uint64_t n) noexcept;

 private:
  void refill() noexcept;

  Philox4x32::Key key_;
  std::uint64_t block_ = 0;
  std::uint64_t lane_;
  std::array<std::uint64_t, 2> buf_{};
  int buf_pos_ = 2;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace apmarkov
