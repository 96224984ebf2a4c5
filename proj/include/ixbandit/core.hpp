#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ixbandit/error.hpp"
#include "ixbandit/rng.hpp"

namespace ixbandit {

// Arms are 0-based throughout the library. File formats and CLI output use
// 1-based indices and convert at the boundary.
using Arm = std::size_t;

inline constexpr double kProbTolerance = 1e-9;

// T x K row-major table of losses in [0, 1].
class LossMatrix {
 public:
  LossMatrix() = default;
  LossMatrix(std::size_t horizon, std::size_t arms);
  LossMatrix(std::size_t horizon, std::size_t arms, std::vector<double> values);

  std::size_t horizon() const { return horizon_; }
  std::size_t arms() const { return arms_; }

  // Round t is 0-based here.
  std::span<const double> row(std::size_t t) const;
  double at(std::size_t t, Arm i) const { return values_[t * arms_ + i]; }
  void set(std::size_t t, Arm i, double loss);

  std::span<const double> values() const { return values_; }

 private:
  std::size_t horizon_ = 0;
  std::size_t arms_ = 0;
  std::vector<double> values_;
};

// A point on the probability simplex. Construction validates nonnegativity,
// finiteness and |sum - 1| <= kProbTolerance.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> weights);

  static ProbVector uniform(std::size_t arms);
  static ProbVector point_mass(std::size_t arms, Arm arm);

  std::size_t size() const { return weights_.size(); }
  double operator[](Arm i) const { return weights_[i]; }
  std::span<const double> weights() const { return weights_; }
  const std::vector<double>& vector() const { return weights_; }

  // Throws ConfigError when `weights` is not a valid distribution.
  static void validate(std::span<const double> weights);

 private:
  std::vector<double> weights_;
};

enum class ScheduleKind { Fixed, Anytime };

// Learning-rate and IX parameter schedule. Fixed returns base * multiplier
// every round; Anytime returns base * multiplier / sqrt(t).
struct Schedule {
  ScheduleKind kind = ScheduleKind::Fixed;
  double base_eta = 1.0;
  double base_gamma = 0.0;
  double multiplier = 1.0;

  static Schedule fixed(double eta, double gamma, double multiplier = 1.0);
  static Schedule anytime(double base_eta, double base_gamma,
                          double multiplier = 1.0);

  // t is the 1-based round number.
  double eta(std::size_t t) const;
  double gamma(std::size_t t) const;

  void validate() const;
};

// Running sums of estimated losses plus the 1-based round counter.
struct PolicyState {
  std::vector<double> cumulative;
  std::size_t round = 1;
  Schedule schedule;

  PolicyState() = default;
  PolicyState(std::size_t arms, Schedule sched)
      : cumulative(arms, 0.0), schedule(sched) {}

  std::size_t arms() const { return cumulative.size(); }
};

// Inverse-CDF draw; returns i with probability p_i and advances rng by one.
Arm sample_arm(const ProbVector& p, Rng& rng);
// Same, validating a raw weight span first.
Arm sample_arm(std::span<const double> p, Rng& rng);

// p_i proportional to exp(-eta * (L_i - min_j L_j)).
ProbVector softmax_from_losses(std::span<const double> cumulative, double eta);

// Lowest index wins ties.
Arm argmin(std::span<const double> values);
Arm argmax(std::span<const double> values);

}  // namespace ixbandit
