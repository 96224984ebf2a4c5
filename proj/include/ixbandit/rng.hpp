#pragma once

#include <cstdint>

namespace ixbandit {

// Counter-based 64-bit generator. Each (seed, stream) pair selects a key; the
// n-th draw is a SplitMix64-style finalizer applied to key + n * golden. Draws
// can therefore be reproduced from (seed, stream, counter) alone, and child
// streams are derived without touching the parent's counter.
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return at(counter_++); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return to_unit(next_u64()); }

  // The draw at an absolute counter position; does not advance the generator.
  std::uint64_t at(std::uint64_t counter) const;

  // Independent child stream keyed on (this stream, tag).
  Rng derive(std::uint64_t tag) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t counter() const { return counter_; }

  static std::uint64_t mix64(std::uint64_t z);
  static double to_unit(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ixbandit
