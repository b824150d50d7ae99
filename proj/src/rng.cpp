#include "rismux/rng.hpp"

#include <cmath>

namespace rismux {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t stream_id(std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t h = mix64(a);
  h = mix64(h ^ b);
  h = mix64(h ^ c);
  return h;
}

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& x, const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * x[2];
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> PhiloxStream::block(std::uint64_t key, std::uint64_t stream,
                                                 std::uint64_t index) {
  std::array<std::uint32_t, 4> ctr = {
      static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  std::array<std::uint32_t, 2> k = {static_cast<std::uint32_t>(key),
                                    static_cast<std::uint32_t>(key >> 32)};
  philox_round(ctr, k);
  for (int r = 1; r < 10; ++r) {
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
    philox_round(ctr, k);
  }
  return ctr;
}

std::uint32_t PhiloxStream::next_u32() {
  if (pos_ == 4) {
    buf_ = block(key_, stream_, block_index_++);
    pos_ = 0;
  }
  return buf_[pos_++];
}

std::uint64_t PhiloxStream::next_u64() {
  const std::uint64_t hi = next_u32();
  return (hi << 32) | next_u32();
}

double PhiloxStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double PhiloxStream::next_uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

std::array<double, 2> PhiloxStream::next_gaussian_pair() {
  // u1 in (0, 1] so the log is finite.
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  const double u2 = next_unit();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double w = 2.0 * M_PI * u2;
  return {r * std::cos(w), r * std::sin(w)};
}

std::complex<double> PhiloxStream::next_cn01() {
  const auto z = next_gaussian_pair();
  return {z[0] * M_SQRT1_2, z[1] * M_SQRT1_2};
}

}  // namespace rismux
