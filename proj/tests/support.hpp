#pragma once

// Hand-rolled generators for property tests. They use the standard library
// engine so that test inputs do not depend on the library's own RNG.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "ixbandit/core.hpp"
#include "ixbandit/graphs.hpp"

namespace testgen {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(eng_); }
  double range(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng_);
  }
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_);
  }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(eng_);
  }
  bool coin(double p = 0.5) { return unit() < p; }

  // Strictly positive point of the simplex; entries vary over several
  // orders of magnitude.
  std::vector<double> simplex(std::size_t k) {
    std::vector<double> w(k);
    double total = 0.0;
    for (auto& x : w) {
      x = std::exp(range(-6.0, 0.0));
      total += x;
    }
    for (auto& x : w) x /= total;
    return w;
  }

  std::vector<double> losses(std::size_t k) {
    std::vector<double> l(k);
    for (auto& x : l) {
      const double r = unit();
      x = r < 0.15 ? 0.0 : r < 0.3 ? 1.0 : unit();
    }
    return l;
  }

  ixbandit::LossMatrix matrix(std::size_t t, std::size_t k, bool binary = false) {
    ixbandit::LossMatrix m(t, k);
    for (std::size_t r = 0; r < t; ++r) {
      for (std::size_t i = 0; i < k; ++i) {
        m.set(r, i, binary ? (coin() ? 1.0 : 0.0) : unit());
      }
    }
    return m;
  }

  ixbandit::FeedbackGraph graph(std::size_t nodes, double density) {
    ixbandit::FeedbackGraph g(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      for (std::size_t j = 0; j < nodes; ++j) {
        if (i != j && coin(density)) g.add_arc(i, j);
      }
    }
    return g;
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

}  // namespace testgen
