#include "ixbandit/rng.hpp"

namespace ixbandit {
namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kStreamSalt = 0xd1b54a32d192ed03ULL;
constexpr std::uint64_t kDeriveSalt = 0x8cb92ba72f3d8dd7ULL;

}  // namespace

std::uint64_t Rng::mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed),
      stream_(stream),
      key_(mix64(seed ^ mix64(stream + kStreamSalt))) {}

std::uint64_t Rng::at(std::uint64_t counter) const {
  return mix64(key_ + (counter + 1) * kGolden);
}

Rng Rng::derive(std::uint64_t tag) const {
  return Rng(seed_, mix64(stream_ ^ mix64(tag + kDeriveSalt)));
}

}  // namespace ixbandit
