#ifndef MMCA_RNG_HPP
#define MMCA_RNG_HPP

#include <cstdint>

namespace mmca::rng {

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

// SplitMix64 finalizer. Counter-based: the same key always yields the same
// value, independent of call order or thread scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += kGolden;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Derive an independent stream seed, e.g. per replicate or per retry.
inline std::uint64_t derive(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 1));
}

// Uniform draw in [0, 1) keyed by (seed, i, j).
inline double cell_uniform(std::uint64_t seed, std::int64_t i, std::int64_t j) {
  std::uint64_t h = splitmix64(seed ^ (kGolden * (static_cast<std::uint64_t>(i) + 1)));
  h = splitmix64(h ^ (kGolden * (static_cast<std::uint64_t>(j) + 1)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Small sequential stream for shuffles; platform-independent unlike the
// standard library distributions.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += kGolden;
    std::uint64_t x = state_;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }

  // Uniform integer in [0, n). Lemire multiply-shift, no rejection.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

}  // namespace mmca::rng

#endif  // MMCA_RNG_HPP
