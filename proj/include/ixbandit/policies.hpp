#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ixbandit/core.hpp"
#include "ixbandit/graphs.hpp"

namespace ixbandit {

// N x K row-stochastic advice matrix for one round.
class ExpertAdvice {
 public:
  ExpertAdvice(std::size_t experts, std::size_t arms, std::vector<double> rows);

  // Expert n always recommends arm n.
  static ExpertAdvice point_masses(std::size_t arms);

  std::size_t experts() const { return experts_; }
  std::size_t arms() const { return arms_; }
  double at(std::size_t expert, Arm arm) const {
    return rows_[expert * arms_ + arm];
  }
  std::span<const double> row(std::size_t expert) const {
    return std::span<const double>(rows_).subspan(expert * arms_, arms_);
  }

 private:
  std::size_t experts_;
  std::size_t arms_;
  std::vector<double> rows_;
};

struct StepResult {
  Arm arm = 0;
  double loss = 0.0;
};

// --- Single-round transitions ---------------------------------------------
//
// Each takes the loss vector the environment has already committed for this
// round and reads only the entries the learner is entitled to observe.

// Softmax of the cumulative IX estimates, draw, accumulate l/(p+gamma).
StepResult exp3ix_round(PolicyState& state, double gamma, double eta, Rng& rng,
                        std::span<const double> losses);

// As exp3ix_round with the unbiased estimate l/p.
StepResult exp3_round(PolicyState& state, double eta, Rng& rng,
                      std::span<const double> losses);

// eta_t = multiplier * sqrt(log K / (K t)), gamma_t = eta_t / 2.
std::pair<double, double> exp3ix_anytime_params(std::size_t t, std::size_t arms,
                                                double multiplier = 1.0);

// Reward-game state: cumulative biased reward estimates.
struct Exp3PState {
  std::vector<double> cumulative_reward;
  std::size_t round = 1;

  explicit Exp3PState(std::size_t arms) : cumulative_reward(arms, 0.0) {}
};

// (1 - gamma) * softmax(eta * R) + gamma / K.
ProbVector exp3p_distribution(const Exp3PState& state, double eta,
                              double gamma);
StepResult exp3p_round(Exp3PState& state, double eta, double gamma,
                       double beta, Rng& rng, std::span<const double> losses);

struct Exp4State {
  std::size_t arms;
  std::vector<double> expert_cumulative;  // sum_s sum_i xi_{s,i}(n) l~_{s,i}
  std::size_t round = 1;

  Exp4State(std::size_t arms, std::size_t experts)
      : arms(arms), expert_cumulative(experts, 0.0) {}
};

// p = sum_n pi(n) xi(n) with pi the softmax of expert cumulative estimates.
ProbVector exp4ix_distribution(const Exp4State& state,
                               const ExpertAdvice& advice, double eta);
StepResult exp4ix_round(Exp4State& state, const ExpertAdvice& advice,
                        double eta, double gamma, Rng& rng,
                        std::span<const double> losses);

// Fixed-Share step on raw weights:
//   v_i = w_i exp(-eta e_i),  w'_i = (1 - alpha) v_i + alpha/K * sum_j v_j.
// The result is not normalised.
std::vector<double> fixed_share_update(std::span<const double> weights,
                                       std::span<const double> estimates,
                                       double eta, double alpha);

// Draw from p proportional to `weights`, apply the IX estimate and the
// Fixed-Share step, then rescale the weights to sum to one.
StepResult exp3six_round(std::vector<double>& weights, double eta, double gamma,
                         double alpha, Rng& rng,
                         std::span<const double> losses);

struct GraphStepResult {
  Arm arm = 0;
  double loss = 0.0;
  std::vector<Arm> observed;
};

GraphStepResult exp3ix_graph_round(PolicyState& state,
                                   const FeedbackGraph& graph, double eta,
                                   double gamma, Rng& rng,
                                   std::span<const double> losses);

// --- Policy objects ---------------------------------------------------------

class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string_view name() const = 0;
  virtual std::size_t arms() const = 0;
  // 1-based number of the round the next step() will play.
  virtual std::size_t round() const = 0;
  // Distribution the next step() samples from.
  virtual ProbVector distribution() const = 0;
  virtual StepResult step(Rng& rng, std::span<const double> losses) = 0;
};

class Exp3Policy final : public Policy {
 public:
  Exp3Policy(std::size_t arms, Schedule schedule);

  std::string_view name() const override { return "exp3"; }
  std::size_t arms() const override { return state_.arms(); }
  std::size_t round() const override { return state_.round; }
  ProbVector distribution() const override;
  StepResult step(Rng& rng, std::span<const double> losses) override;

  const PolicyState& state() const { return state_; }

 private:
  PolicyState state_;
};

class Exp3IxPolicy final : public Policy {
 public:
  Exp3IxPolicy(std::size_t arms, Schedule schedule);

  std::string_view name() const override { return "exp3ix"; }
  std::size_t arms() const override { return state_.arms(); }
  std::size_t round() const override { return state_.round; }
  ProbVector distribution() const override;
  StepResult step(Rng& rng, std::span<const double> losses) override;

  const PolicyState& state() const { return state_; }

 private:
  PolicyState state_;
};

struct Exp3PParams {
  double eta;
  double gamma;  // in [0, 1]
  double beta;

  void validate() const;
};

class Exp3PPolicy final : public Policy {
 public:
  Exp3PPolicy(std::size_t arms, Exp3PParams params);

  std::string_view name() const override { return "exp3p"; }
  std::size_t arms() const override { return state_.cumulative_reward.size(); }
  std::size_t round() const override { return state_.round; }
  ProbVector distribution() const override;
  StepResult step(Rng& rng, std::span<const double> losses) override;

  const Exp3PParams& params() const { return params_; }

 private:
  Exp3PParams params_;
  Exp3PState state_;
};

// Advice for round t (1-based). Must be determined by the history before t.
using AdviceProvider = std::function<ExpertAdvice(std::size_t round)>;

class Exp4IxPolicy final : public Policy {
 public:
  Exp4IxPolicy(std::size_t arms, std::size_t experts, Schedule schedule,
               AdviceProvider advice);

  std::string_view name() const override { return "exp4ix"; }
  std::size_t arms() const override { return state_.arms; }
  std::size_t round() const override { return state_.round; }
  ProbVector distribution() const override;
  StepResult step(Rng& rng, std::span<const double> losses) override;

  const Exp4State& state() const { return state_; }

 private:
  ExpertAdvice advice_for_round() const;

  Exp4State state_;
  Schedule schedule_;
  AdviceProvider advice_;
};

class Exp3SixPolicy final : public Policy {
 public:
  Exp3SixPolicy(std::size_t arms, Schedule schedule, double alpha);

  std::string_view name() const override { return "exp3six"; }
  std::size_t arms() const override { return weights_.size(); }
  std::size_t round() const override { return round_; }
  ProbVector distribution() const override;
  StepResult step(Rng& rng, std::span<const double> losses) override;

  std::span<const double> weights() const { return weights_; }

 private:
  std::vector<double> weights_;
  Schedule schedule_;
  double alpha_;
  std::size_t round_ = 1;
};

class GraphExp3IxPolicy final : public Policy {
 public:
  GraphExp3IxPolicy(std::shared_ptr<const FeedbackGraph> graph,
                    Schedule schedule);

  std::string_view name() const override { return "exp3ix-graph"; }
  std::size_t arms() const override { return state_.arms(); }
  std::size_t round() const override { return state_.round; }
  ProbVector distribution() const override;
  StepResult step(Rng& rng, std::span<const double> losses) override;

  const std::vector<Arm>& last_observed() const { return last_observed_; }
  const PolicyState& state() const { return state_; }

 private:
  std::shared_ptr<const FeedbackGraph> graph_;
  PolicyState state_;
  std::vector<Arm> last_observed_;
};

}  // namespace ixbandit
