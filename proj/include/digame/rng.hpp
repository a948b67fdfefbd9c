#ifndef DIGAME_RNG_HPP
#define DIGAME_RNG_HPP

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace digame {

/// Deterministic random source used by every sampler in the project.
///
/// Streams are derived from a master seed with splitmix64, so trajectory k of
/// a run is independent of how many threads executed it and reruns are
/// bit-identical. Uniform doubles are built from the top 53 bits of the
/// mt19937_64 output instead of std::uniform_real_distribution, whose output
/// is not pinned down by the standard.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  /// Stream `stream` of master seed `master`.
  static Rng stream(std::uint64_t master, std::uint64_t stream) {
    return Rng(splitmix64(splitmix64(master) ^
                          splitmix64(0x9E3779B97F4A7C15ULL * (stream + 1))));
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double next_unit() { return (gen_() >> 11) * 0x1.0p-53; }

  /// Index drawn from nonnegative weights by inverse CDF walk.
  /// `total` defaults to the weight sum computed here; callers holding a
  /// normalized row can pass 1.0.
  std::size_t sample(std::span<const double> weights, double total = -1.0) {
    if (weights.empty()) throw std::invalid_argument("sample: empty weights");
    if (total < 0.0) {
      total = 0.0;
      for (double w : weights) total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("sample: zero total weight");
    double u = next_unit() * total;
    double acc = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t k = 0; k < weights.size(); ++k) {
      if (weights[k] > 0.0) last_positive = k;
      acc += weights[k];
      if (u < acc) return k;
    }
    // Rounding pushed u past the accumulated sum; land on the last
    // positive-weight entry.
    return last_positive;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace digame

#endif  // DIGAME_RNG_HPP
