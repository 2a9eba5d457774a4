#pragma once

#include <array>
#include <cstdint>

namespace lqbsde {

// Philox4x32-10 (Salmon et al., SC'11). Stateless: a 128-bit counter and a
// 64-bit key map to 128 random bits.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  static Counter block(Counter counter, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeylA;
        key[1] += kWeylB;
      }
      const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * counter[0];
      const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * counter[2];
      counter = {static_cast<std::uint32_t>(p1 >> 32) ^ counter[1] ^ key[0],
                 static_cast<std::uint32_t>(p1),
                 static_cast<std::uint32_t>(p0 >> 32) ^ counter[3] ^ key[1],
                 static_cast<std::uint32_t>(p0)};
    }
    return counter;
  }

 private:
  static constexpr std::uint32_t kMulA = 0xD2511F53;
  static constexpr std::uint32_t kMulB = 0xCD9E8D57;
  static constexpr std::uint32_t kWeylA = 0x9E3779B9;
  static constexpr std::uint32_t kWeylB = 0xBB67AE85;
};

// 52 random bits mapped to the midpoint lattice of (0, 1); never 0 or 1.
// (53 bits would put the top midpoint at 1 - 2^-54, which rounds to 1.)
inline double open_unit_interval(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

// Standard normal quantile, Wichura's algorithm AS 241 (PPND16), relative
// accuracy about 1e-16 on (0, 1).
double normal_quantile(double p);

}  // namespace lqbsde
