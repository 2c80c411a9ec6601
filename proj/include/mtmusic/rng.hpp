#pragma once

#include <cstdint>
#include <limits>

namespace mtmusic {

/// Identifies one independent random stream: (master seed, trial index, stream id).
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t trial = 0;
  std::uint64_t stream = 0;
};

namespace stream_ids {
inline constexpr std::uint64_t kSources = 1;
inline constexpr std::uint64_t kNoise = 2;
inline constexpr std::uint64_t kTexture = 3;
}  // namespace stream_ids

inline constexpr std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix_key(const StreamKey& k) {
  std::uint64_t h = splitmix64(k.seed ^ 0x6a09e667f3bcc909ULL);
  h = splitmix64(h ^ k.trial);
  h = splitmix64(h ^ (k.stream * 0xd1b54a32d192ed03ULL));
  return h;
}

/// Counter-based generator: the i-th output is a pure function of (key, i), so
/// streams never share state and trials can run in any order or thread.
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(const StreamKey& key) : key_(mix_key(key)) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    return splitmix64(key_ + 0x632be59bd9b4e019ULL * (++counter_));
  }

  /// Uniform double in (0, 1), never exactly 0 or 1.
  double uniform_open() { return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace mtmusic
