#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace eb::rng {

/// Philox4x32-10 keyed counter block (Salmon et al., SC 2011).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u;
  constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u;
  constexpr std::uint32_t kW1 = 0xBB67AE85u;

  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

/// Reserved step index for initial-state sampling substreams.
inline constexpr std::uint32_t kInitStep = 0xFFFFFFFFu;

/// Fills `count` standard normal deviates for the substream addressed by
/// (seed, stream, step). Every call is a pure function of its address, so any
/// parallel schedule reproduces identical draws.
inline void fill_normals(std::uint64_t seed, std::uint64_t stream, std::uint32_t step,
                         double* out, int count) {
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(seed),
                                            static_cast<std::uint32_t>(seed >> 32)};
  const auto to_unit = [](std::uint32_t lo, std::uint32_t hi) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 32) | lo;
    // 53-bit mantissa in (0, 1); never exactly zero, so logs are safe.
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  };

  int produced = 0;
  std::uint32_t block = 0;
  while (produced < count) {
    const auto words = philox4x32({block++, step, static_cast<std::uint32_t>(stream),
                                   static_cast<std::uint32_t>(stream >> 32)},
                                  key);
    const double u1 = to_unit(words[0], words[1]);
    const double u2 = to_unit(words[2], words[3]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 6.283185307179586476925286766559 * u2;
    out[produced++] = radius * std::cos(angle);
    if (produced < count) {
      out[produced++] = radius * std::sin(angle);
    }
  }
}

}  // namespace eb::rng
