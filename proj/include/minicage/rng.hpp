#pragma once

#include <cstdint>
#include <span>

namespace minicage {

// Counter-based random numbers: every draw is a pure function of
// (key, index), so trajectories never depend on call interleaving or on
// how instances are scheduled across threads.

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ (mix64(b) + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

template <class... Rest>
constexpr std::uint64_t derive_key(std::uint64_t first, Rest... rest) noexcept {
  std::uint64_t k = mix64(first);
  ((k = hash_combine(k, static_cast<std::uint64_t>(rest))), ...);
  return k;
}

// Stream tags keep environment and agent randomness disjoint.
enum class Stream : std::uint64_t {
  Environment = 0x454e56,
  BlueAgent = 0x424c55,
  RedAgent = 0x524544,
  Bench = 0x42454e,
  Episode = 0x455053,
};

constexpr std::uint64_t draw_u64(std::uint64_t key, std::uint64_t index) noexcept {
  return mix64(key ^ mix64(index * 0xd1b54a32d192ed03ULL + 1));
}

/// Uniform double in [0, 1) with 53 random bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Uniform integer in [0, n) by multiply-shift; n > 0.
constexpr std::uint64_t to_index(std::uint64_t bits, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(bits) * n) >> 64);
}

// A keyed stream with an explicit draw counter.
class CounterRng {
 public:
  constexpr CounterRng() = default;
  constexpr explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) noexcept
      : key_(key), counter_(counter) {}

  constexpr std::uint64_t next_u64() noexcept { return draw_u64(key_, counter_++); }
  constexpr double uniform() noexcept { return to_unit(next_u64()); }
  constexpr std::uint64_t index(std::uint64_t n) noexcept { return to_index(next_u64(), n); }
  constexpr bool bernoulli(double p) noexcept { return uniform() < p; }

  template <class T>
  constexpr const T& pick(std::span<const T> items) noexcept {
    return items[index(items.size())];
  }

  constexpr std::uint64_t key() const noexcept { return key_; }
  constexpr std::uint64_t counter() const noexcept { return counter_; }

  friend constexpr bool operator==(const CounterRng&, const CounterRng&) = default;

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace minicage
