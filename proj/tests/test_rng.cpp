#include <doctest.h>

#include <cmath>
#include <set>

#include "ixbandit/rng.hpp"

using ixbandit::Rng;

TEST_CASE("same seed and stream reproduce the sequence") {
  Rng a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("at() agrees with sequential draws and does not advance") {
  Rng a(3, 1);
  const Rng probe(3, 1);
  for (std::uint64_t c = 0; c < 100; ++c) CHECK(a.next_u64() == probe.at(c));
  CHECK(probe.counter() == 0);
  CHECK(a.counter() == 100);
}

TEST_CASE("streams and seeds select different sequences") {
  std::set<std::uint64_t> firsts;
  for (std::uint64_t s = 0; s < 50; ++s) {
    firsts.insert(Rng(s, 0).at(0));
    firsts.insert(Rng(0, s + 1000).at(0));
  }
  CHECK(firsts.size() == 100);
}

TEST_CASE("derived streams are reproducible and leave the parent alone") {
  Rng parent(9, 2);
  parent.next_u64();
  const Rng c1 = parent.derive(5);
  const Rng c2 = parent.derive(5);
  const Rng c3 = parent.derive(6);
  CHECK(c1.at(0) == c2.at(0));
  CHECK(c1.at(0) != c3.at(0));
  CHECK(parent.counter() == 1);
  CHECK(c1.seed() == 9);
}

TEST_CASE("uniform draws lie in [0,1) with the right first two moments") {
  Rng r(123, 0);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  // sd of the mean is sqrt(1/12 / n) ~ 6.5e-4
  CHECK(std::abs(mean - 0.5) < 5 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sq / n - 1.0 / 3.0) < 0.005);
  CHECK(Rng::to_unit(~0ULL) < 1.0);
  CHECK(Rng::to_unit(0) == 0.0);
}
