#include <doctest.h>

#include <cmath>
#include <limits>

#include "ixbandit/core.hpp"
#include "support.hpp"

using namespace ixbandit;

TEST_CASE("loss matrix validates shape and range") {
  CHECK_THROWS_AS(LossMatrix(0, 3), ConfigError);
  CHECK_THROWS_AS(LossMatrix(2, 2, {0.1, 0.2, 0.3}), ConfigError);
  CHECK_THROWS_AS(LossMatrix(1, 2, {0.1, 1.5}), ConfigError);
  CHECK_THROWS_AS(LossMatrix(1, 2, {-0.1, 0.5}), ConfigError);
  CHECK_THROWS_AS(LossMatrix(1, 1, {std::nan("")}), ConfigError);
  LossMatrix m(2, 3, {0, 0.5, 1, 1, 0.25, 0});
  CHECK(m.row(1)[1] == 0.25);
  CHECK(m.at(0, 2) == 1.0);
  CHECK_THROWS_AS(m.row(2), ConfigError);
  CHECK_THROWS_AS(m.set(0, 0, 2.0), ConfigError);
  CHECK_THROWS_AS(m.set(0, 3, 0.0), ConfigError);
  m.set(1, 2, 0.75);
  CHECK(m.at(1, 2) == 0.75);
}

TEST_CASE("probability vectors are validated on construction") {
  CHECK_THROWS_AS(ProbVector({}), ConfigError);
  CHECK_THROWS_AS(ProbVector({0.5, 0.6}), ConfigError);
  CHECK_THROWS_AS(ProbVector({1.2, -0.2}), ConfigError);
  CHECK_THROWS_AS(ProbVector({std::nan(""), 1.0}), ConfigError);
  CHECK_NOTHROW(ProbVector({0.5, 0.5 + 1e-10}));
  const auto u = ProbVector::uniform(4);
  CHECK(u[3] == 0.25);
  const auto pm = ProbVector::point_mass(3, 1);
  CHECK(pm[1] == 1.0);
  CHECK(pm[0] == 0.0);
  CHECK_THROWS_AS(ProbVector::point_mass(3, 3), ConfigError);
  CHECK_THROWS_AS(ProbVector::uniform(0), ConfigError);
}

TEST_CASE("schedules scale by the multiplier and the anytime rate") {
  const auto f = Schedule::fixed(0.2, 0.1, 3.0);
  CHECK(f.eta(1) == doctest::Approx(0.6));
  CHECK(f.eta(1000) == doctest::Approx(0.6));
  CHECK(f.gamma(7) == doctest::Approx(0.3));
  const auto a = Schedule::anytime(0.2, 0.1, 2.0);
  CHECK(a.eta(4) == doctest::Approx(0.2));
  CHECK(a.gamma(100) == doctest::Approx(0.02));
  for (std::size_t t = 1; t < 50; ++t) CHECK(a.gamma(t + 1) <= a.gamma(t));
  CHECK_THROWS_AS(Schedule::fixed(0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(Schedule::fixed(0.1, -0.1), ConfigError);
  CHECK_THROWS_AS(Schedule::fixed(0.1, 0.1, 0.0), ConfigError);
}

TEST_CASE("sample_arm follows the distribution and skips zero-mass arms") {
  const std::vector<double> p{0.1, 0.0, 0.6, 0.3};
  const ProbVector pv(p);
  Rng rng(5, 0);
  const int n = 100000;
  std::vector<int> counts(4, 0);
  for (int i = 0; i < n; ++i) ++counts[sample_arm(pv, rng)];
  CHECK(counts[1] == 0);
  for (Arm i = 0; i < 4; ++i) {
    const double se = std::sqrt(p[i] * (1 - p[i]) / n);
    CHECK(std::abs(counts[i] / double(n) - p[i]) <= 4 * se + 1e-12);
  }
  CHECK(rng.counter() == static_cast<std::uint64_t>(n));
  const std::vector<double> bad{0.5, 0.4};
  CHECK_THROWS_AS(sample_arm(std::span<const double>(bad), rng), ConfigError);
}

TEST_CASE("point mass is always sampled") {
  Rng rng(1, 1);
  const auto pm = ProbVector::point_mass(5, 4);
  for (int i = 0; i < 1000; ++i) CHECK(sample_arm(pm, rng) == 4);
}

TEST_CASE("softmax is shift invariant and ordered") {
  testgen::Gen g(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t k = g.between(1, 12);
    std::vector<double> l(k), shifted(k);
    const double c = g.range(-1e3, 1e3);
    for (std::size_t i = 0; i < k; ++i) {
      l[i] = g.range(0.0, 50.0);
      shifted[i] = l[i] + c;
    }
    const double eta = g.range(0.01, 2.0);
    const auto p = softmax_from_losses(l, eta);
    const auto q = softmax_from_losses(shifted, eta);
    for (std::size_t i = 0; i < k; ++i) {
      CHECK(p[i] == doctest::Approx(q[i]).epsilon(1e-9));
      for (std::size_t j = 0; j < k; ++j) {
        if (l[i] < l[j]) CHECK(p[i] >= p[j]);
      }
    }
  }
}

TEST_CASE("softmax stays a valid distribution at extreme magnitudes") {
  testgen::Gen g(12);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t k = g.between(2, 20);
    std::vector<double> l(k);
    for (auto& x : l) x = g.range(0.0, 1e7);
    const double eta = g.range(1e-6, 10.0);
    const auto p = softmax_from_losses(l, eta);
    double total = 0.0;
    for (Arm i = 0; i < k; ++i) {
      CHECK(p[i] >= 0.0);
      total += p[i];
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("softmax rejects bad inputs") {
  const std::vector<double> l{0.0, 1.0};
  CHECK_THROWS_AS(softmax_from_losses(l, 0.0), NumericError);
  CHECK_THROWS_AS(softmax_from_losses(l, std::numeric_limits<double>::infinity()),
                  NumericError);
  const std::vector<double> bad{0.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(softmax_from_losses(bad, 1.0), NumericError);
  CHECK_THROWS_AS(softmax_from_losses(std::vector<double>{}, 1.0), ConfigError);
}

TEST_CASE("softmax of equal losses is uniform; argmin and argmax break ties low") {
  const std::vector<double> l{2.0, 2.0, 2.0};
  const auto p = softmax_from_losses(l, 0.5);
  for (Arm i = 0; i < 3; ++i) CHECK(p[i] == doctest::Approx(1.0 / 3.0));
  const std::vector<double> v{3.0, 1.0, 1.0, 5.0, 5.0};
  CHECK(argmin(v) == 1);
  CHECK(argmax(v) == 3);
}
