#ifndef ACTSAMP_RANDOM_HPP
#define ACTSAMP_RANDOM_HPP

#include <cstdint>
#include <random>

namespace actsamp {

// Seeded random stream with value semantics.  Only the raw engine output of
// std::mt19937_64 is used (the engine itself is pinned by the standard);
// uniform and normal variates are derived by hand so that a given seed yields
// the same draws on any implementation.  Child streams are derived from the
// parent seed and a stream id, independent of how much the parent has been
// consumed.
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller, second value of each pair is cached.
  double normal();

  // Uniform integer in [0, bound) by rejection, bound >= 1.
  std::uint64_t uniform_below(std::uint64_t bound);

  RandomStream split(std::uint64_t stream_id) const;

  std::uint64_t seed() const { return seed_; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_normal_ = false;
};

// splitmix64 finalizer, used for seed derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace actsamp

#endif
