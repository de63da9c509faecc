#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace toppleone {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood / Stafford mix13).
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

}  // namespace detail

/// Stateless-seedable splitmix64 stream, used to expand seeds.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}
  constexpr std::uint64_t operator()() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// xoshiro256++ 1.0 (Blackman & Vigna), period 2^256 - 1, with 2^128 jump.
/// Substreams are derived counter-style: (seed, stream index) feed an
/// avalanche mix whose output seeds the splitmix64 state expansion, so a
/// stream is a pure function of (seed, index).
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) noexcept { init(seed); }

  static Xoshiro256pp for_stream(std::uint64_t seed, std::uint64_t stream) noexcept {
    Xoshiro256pp r(0);
    r.init(detail::mix64(seed + 0x9e3779b97f4a7c15ULL * (stream + 1)));
    return r;
  }

  result_type operator()() noexcept {
    const std::uint64_t result = detail::rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = detail::rotl(s_[3], 45);
    return result;
  }

  /// Advances the state by 2^128 steps.
  void jump() noexcept {
    static constexpr std::uint64_t tbl[] = {0x180ec6d33cfd0abaULL, 0xd5a61266f0c9392cULL,
                                            0xa9582618e03fc9aaULL, 0x39abdc4529b1661cULL};
    std::uint64_t s0 = 0, s1 = 0, s2 = 0, s3 = 0;
    for (std::uint64_t jump_const : tbl)
      for (int b = 0; b < 64; ++b) {
        if (jump_const & (1ULL << b)) {
          s0 ^= s_[0];
          s1 ^= s_[1];
          s2 ^= s_[2];
          s3 ^= s_[3];
        }
        (*this)();
      }
    s_ = {s0, s1, s2, s3};
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<std::uint64_t>::max();
  }

 private:
  void init(std::uint64_t seed) noexcept {
    SplitMix64 sm(seed);
    s_ = {sm(), sm(), sm(), sm()};
    if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 0x9e3779b97f4a7c15ULL;
  }

  std::array<std::uint64_t, 4> s_;
};

/// One uniform double on the open interval (0,1): 53 random bits, zero
/// rejected (the value 1.0 is unreachable by construction).
template <class Rng>
inline double open_unit(Rng& rng) {
  for (;;) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    if (u != 0.0) return u;
  }
}

inline constexpr const char* kGeneratorName =
    "xoshiro256++-1.0/splitmix64-substreams";

}  // namespace toppleone
