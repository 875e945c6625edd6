#ifndef SPAQL_RNG_HPP
#define SPAQL_RNG_HPP

#include <cstdint>
#include <random>

namespace spaql {

/// Seeded 64-bit Mersenne Twister with a portable [0,1) draw.
///
/// std::uniform_real_distribution is implementation-defined, so uniforms are
/// built directly from the top 53 bits to keep runs bit-identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

// Stream ids derived from a single agent seed.
inline constexpr std::uint64_t kTrainStream = 0;
inline constexpr std::uint64_t kEvalStream = 1;

}  // namespace spaql

#endif  // SPAQL_RNG_HPP
