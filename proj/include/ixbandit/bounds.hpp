#pragma once

#include <cstddef>
#include <optional>

namespace ixbandit {

// Inputs to the high-probability regret certificates. Logarithms are natural.
struct BoundSpec {
  std::size_t arms = 2;
  std::size_t horizon = 1;
  double delta = 0.05;
  std::optional<std::size_t> switches;      // tracking
  std::optional<std::size_t> experts;       // expert advice
  std::optional<std::size_t> independence;  // side observations

  void validate() const;
};

// 2 sqrt(2KT log K) + (sqrt(2KT / log K) + 1) log(2/delta)
double bound_thm1_fixed(const BoundSpec& spec);

// 4 sqrt(KT log K) + (2 sqrt(KT / log K) + 1) log(2/delta)
double bound_thm1_anytime(const BoundSpec& spec);

// 2 sqrt(2KT log N) + (sqrt(2KT / log N) + 1) log(2/delta)
double bound_thm2(const BoundSpec& spec);

// 2 sqrt(2KT S' log(eKT/S)) + (sqrt(2KT / (S' log K)) + 1) log(2/delta),
// S' = S + 1, S >= 1.
double bound_thm3(const BoundSpec& spec);

// (4 + 2 sqrt(log(4/delta))) sqrt(2aT (log^2 K + log KT))
//   + 2 sqrt(aT log(KT) / log K) log(4/delta) + sqrt(T log(4/delta) / 2)
// with a the independence number. Requires T >= K^2 / (8a).
double bound_thm4(const BoundSpec& spec);

// True when T >= K^2 / (8a).
bool thm4_horizon_ok(std::size_t arms, std::size_t horizon,
                     std::size_t independence);

}  // namespace ixbandit
