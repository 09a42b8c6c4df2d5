#ifndef PICRUSTKIT_CORE_RNG_HPP
#define PICRUSTKIT_CORE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>

#include <Eigen/Dense>

namespace picrustkit {

// All randomness in this project flows through the generator below so that
// results are reproducible from a single documented algorithm rather than
// whatever std::mt19937 + std::*_distribution happen to do on a platform.
//
//   * stream keying: iterated SplitMix64 finalizer over (seed, key_a, key_b)
//   * generator:     xoshiro256++ (Blackman & Vigna), state expanded from the
//                    derived seed with a SplitMix64 sequence
//   * variates:      uniform = 53-bit mantissa fill; normal = Marsaglia polar;
//                    gamma = Marsaglia-Tsang squeeze (boosted for shape < 1)
//
// Monte Carlo code derives one substream per (sample, instance) pair, which
// makes draws independent of feature order, thread count, and group labels.

inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b) {
  return mix64(mix64(mix64(seed) ^ key_a) ^ key_b);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9E3779B97F4A7C15ull;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
      z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
      word = z ^ (z >> 31);
    }
  }

  static Rng substream(std::uint64_t seed, std::uint64_t key_a, std::uint64_t key_b) {
    return Rng(derive_stream_seed(seed, key_a, key_b));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1), 53 random mantissa bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1); rejects exact zeros so logs are safe.
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return u;
  }

  std::uint64_t uniform_below(std::uint64_t bound) {
    // Lemire-style rejection keeps the distribution exact.
    std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
  }

  // Gamma(shape, 1). Marsaglia & Tsang (2000); shape < 1 handled with the
  // usual U^(1/shape) boost.
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform_pos();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    while (true) {
      double x, v;
      do {
        x = normal();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  // Dirichlet(alpha): normalized independent gammas.
  Eigen::VectorXd dirichlet(const Eigen::VectorXd& alpha) {
    Eigen::VectorXd draw(alpha.size());
    for (Eigen::Index i = 0; i < alpha.size(); ++i) draw[i] = gamma(alpha[i]);
    const double total = draw.sum();
    if (total > 0.0) draw /= total;
    return draw;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace picrustkit

#endif  // PICRUSTKIT_CORE_RNG_HPP
