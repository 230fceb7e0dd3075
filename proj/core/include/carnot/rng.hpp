#ifndef CARNOT_RNG_HPP
#define CARNOT_RNG_HPP

#include <cstdint>
#include <random>

namespace carnot {

/// SplitMix64 step, used to derive independent substream seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Deterministic per-sample random stream: the state depends only on
/// (seed, index), so parallel consumers produce identical draws regardless
/// of scheduling.
class SampleStream {
 public:
  SampleStream(std::uint64_t seed, std::uint64_t index)
      : eng_(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x51ed2701ULL))) {}

  double gaussian() { return normal_(eng_); }
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * unit_(eng_);
  }
  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

}  // namespace carnot

#endif
