#pragma once

#include <cstdint>
#include <string_view>

namespace vklab {

/// splitmix64 generator. Streams for independent work items are derived with
/// split(), so results do not depend on evaluation order.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Independent stream for (tag, index).
  static SplitMix64 split(std::uint64_t seed, std::string_view tag, std::uint64_t index) {
    std::uint64_t h = 0xCBF29CE484222325ull;  // FNV-1a over the tag
    for (char c : tag) h = (h ^ static_cast<unsigned char>(c)) * 0x100000001B3ull;
    SplitMix64 mix(seed ^ h);
    mix.state_ ^= SplitMix64(index + 0x632BE59BD9B4E019ull).next();
    mix.next();
    return mix;
  }

 private:
  std::uint64_t state_;
};

}  // namespace vklab
