#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ciforge {

inline std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace detail {

inline constexpr std::uint64_t kKeySalt = 0x632be59bd9b4e019ULL;

inline std::uint64_t mix_key(std::uint64_t h, std::uint64_t key) noexcept {
  std::uint64_t state = h ^ (key + kKeySalt);
  return splitmix64(state);
}

}  // namespace detail

/// Derives an independent stream seed from a master seed and a key path,
/// e.g. derive_seed(seed, {bootstrap_index}) or derive_seed(seed, {cell, rep}).
inline std::uint64_t derive_seed(std::uint64_t seed,
                                 std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t state = seed;
  std::uint64_t h = splitmix64(state);
  for (std::uint64_t key : keys) h = detail::mix_key(h, key);
  return h;
}

/// xoshiro256** generator. Cheap to construct, so one instance per bootstrap
/// iteration or per repetition is the intended usage.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    for (auto& word : s_) word = splitmix64(state);
  }

  static Rng for_stream(std::uint64_t seed,
                        std::initializer_list<std::uint64_t> keys) noexcept {
    return Rng(derive_seed(seed, keys));
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform integer in [0, bound). Lemire's multiply-shift with rejection.
  std::uint64_t uniform_index(std::uint64_t bound) noexcept {
    __extension__ using u128 = unsigned __int128;
    u128 m = static_cast<u128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) [[unlikely]] {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<u128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

/// The streams derive_seed(seed, {i}) for i = 0, 1, ... with the shared
/// prefix hashed once. stream(i) equals Rng::for_stream(seed, {i}).
class StreamFamily {
 public:
  explicit StreamFamily(std::uint64_t seed) noexcept {
    std::uint64_t state = seed;
    prefix_ = splitmix64(state);
  }
  Rng stream(std::uint64_t index) const noexcept {
    return Rng(detail::mix_key(prefix_, index));
  }

 private:
  std::uint64_t prefix_;
};

}  // namespace ciforge
