#pragma once

#include <array>
#include <complex>
#include <cstdint>

namespace rismux {

// splitmix64 finalizer; used to hash tuples into stream identifiers.
std::uint64_t mix64(std::uint64_t x);

// Combines up to three 64-bit components into one stream identifier.
std::uint64_t stream_id(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);

// Purpose tags so that (seed, tag, index) tuples never collide across uses.
namespace stream_tag {
inline constexpr std::uint64_t direct = 0x01;        // D entries
inline constexpr std::uint64_t ris_to_bs = 0x02;     // F entries
inline constexpr std::uint64_t users_to_ris = 0x03;  // G entries
inline constexpr std::uint64_t theta_init = 0x04;    // optimizer starting point
inline constexpr std::uint64_t random_phase = 0x05;  // random-phase baseline draw
inline constexpr std::uint64_t sweep_point = 0x06;   // per-point config seeds
inline constexpr std::uint64_t selftest = 0x07;      // gradient self-test instances
}  // namespace stream_tag

// Philox4x32-10 counter-based generator (Salmon et al., Random123 family).
// A (key, stream) pair selects an independent sequence regardless of draw
// order elsewhere, which is what makes trial-parallel Monte-Carlo reproducible.
class PhiloxStream {
 public:
  PhiloxStream(std::uint64_t key, std::uint64_t stream)
      : key_(key), stream_(stream) {}

  // The raw 128-bit block function: counter = (index, stream), key = key.
  static std::array<std::uint32_t, 4> block(std::uint64_t key, std::uint64_t stream,
                                            std::uint64_t index);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_unit();
  double next_uniform(double lo, double hi);

  // Two independent N(0,1) draws (Box-Muller).
  std::array<double, 2> next_gaussian_pair();

  // Circularly-symmetric complex Gaussian, zero mean, unit variance:
  // real and imaginary parts each N(0, 1/2).
  std::complex<double> next_cn01();

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t block_index_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

}  // namespace rismux
