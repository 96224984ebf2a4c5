#pragma once

#include <cstddef>
#include <functional>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ixbandit/core.hpp"

namespace ixbandit {

// Rounds are 1-based in this module.

// Ten-arm Bernoulli problem whose last arm shifts at mid-horizon: arms 1-8
// have mean 1/2, arm 9 has mean 1/2 - gap, arm 10 has mean 1/2 + gap for
// t <= floor(T/2) and 1/2 - 4 gap afterwards.
struct ShiftBernoulliConfig {
  std::size_t arms = 10;
  std::size_t horizon = 1;
  double gap = 0.1;

  void validate() const;
  std::vector<double> means(std::size_t t) const;
};

// Independent Bernoulli(mean_i(t)) draws. The draws for round t come from a
// child stream of `run_stream` keyed on t, so they do not depend on how many
// draws the learner made.
std::vector<double> shift_bernoulli_losses(const ShiftBernoulliConfig& config,
                                           std::size_t t,
                                           const Rng& run_stream);

// Row t of the matrix, verbatim.
std::span<const double> oblivious_losses(const LossMatrix& matrix,
                                         std::size_t t);

// Losses for round t as a function of the actions played in rounds 1..t-1.
using AdaptiveLossFn = std::function<std::vector<double>(
    std::size_t t, std::span<const Arm> history)>;

std::vector<double> adaptive_losses(const AdaptiveLossFn& callback,
                                    std::size_t arms, std::size_t t,
                                    std::span<const Arm> history);

// Common interface used by the runner. losses() is called before the learner
// draws I_t, with the history of I_1..I_{t-1}.
class Environment {
 public:
  virtual ~Environment() = default;
  virtual std::size_t arms() const = 0;
  virtual std::vector<double> losses(std::size_t t,
                                     std::span<const Arm> history) = 0;
  // Known mean losses, when the process is stochastic.
  virtual std::optional<std::vector<double>> means(std::size_t /*t*/) const {
    return std::nullopt;
  }
  // Whether losses() depends on the history argument.
  virtual bool adaptive() const { return false; }
};

class ObliviousEnvironment final : public Environment {
 public:
  explicit ObliviousEnvironment(LossMatrix matrix)
      : matrix_(std::move(matrix)) {}
  std::size_t arms() const override { return matrix_.arms(); }
  std::vector<double> losses(std::size_t t,
                             std::span<const Arm> history) override;
  const LossMatrix& matrix() const { return matrix_; }

 private:
  LossMatrix matrix_;
};

class ShiftBernoulliEnvironment final : public Environment {
 public:
  ShiftBernoulliEnvironment(ShiftBernoulliConfig config, Rng run_stream);
  std::size_t arms() const override { return config_.arms; }
  std::vector<double> losses(std::size_t t,
                             std::span<const Arm> history) override;
  std::optional<std::vector<double>> means(std::size_t t) const override {
    return config_.means(t);
  }

 private:
  ShiftBernoulliConfig config_;
  Rng stream_;
};

class AdaptiveEnvironment final : public Environment {
 public:
  AdaptiveEnvironment(std::size_t arms, AdaptiveLossFn callback);
  std::size_t arms() const override { return arms_; }
  std::vector<double> losses(std::size_t t,
                             std::span<const Arm> history) override;
  bool adaptive() const override { return true; }

 private:
  std::size_t arms_;
  AdaptiveLossFn callback_;
};

// Loss matrices as CSV: T lines of K comma-separated decimals, no header.
LossMatrix parse_loss_csv(std::istream& in, const std::string& source = "csv");
LossMatrix load_loss_csv(const std::string& path);
void write_loss_csv(const LossMatrix& matrix, std::ostream& out);

}  // namespace ixbandit
