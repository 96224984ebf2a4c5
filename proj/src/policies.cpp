#include "ixbandit/policies.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "ixbandit/estimators.hpp"

namespace ixbandit {
namespace {

void check_losses(std::span<const double> losses, std::size_t arms) {
  if (losses.size() != arms) {
    throw ConfigError("loss vector has " + std::to_string(losses.size()) +
                      " entries for " + std::to_string(arms) + " arms");
  }
}

double observed(std::span<const double> losses, Arm arm) {
  const double l = losses[arm];
  if (!(l >= 0.0 && l <= 1.0)) {
    throw ConfigError("environment produced loss " + std::to_string(l) +
                      " outside [0,1]");
  }
  return l;
}

void accumulate(std::vector<double>& into, const std::vector<double>& est) {
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += est[i];
}

}  // namespace

ExpertAdvice::ExpertAdvice(std::size_t experts, std::size_t arms,
                           std::vector<double> rows)
    : experts_(experts), arms_(arms), rows_(std::move(rows)) {
  if (experts_ == 0 || arms_ == 0) {
    throw ConfigError("advice needs at least one expert and one arm");
  }
  if (rows_.size() != experts_ * arms_) {
    throw ConfigError("advice matrix size does not match N x K");
  }
  for (std::size_t n = 0; n < experts_; ++n) {
    try {
      ProbVector::validate(row(n));
    } catch (const ConfigError& e) {
      throw ConfigError("advice of expert " + std::to_string(n + 1) + ": " +
                        e.what());
    }
  }
}

ExpertAdvice ExpertAdvice::point_masses(std::size_t arms) {
  std::vector<double> rows(arms * arms, 0.0);
  for (std::size_t n = 0; n < arms; ++n) rows[n * arms + n] = 1.0;
  return ExpertAdvice(arms, arms, std::move(rows));
}

StepResult exp3ix_round(PolicyState& state, double gamma, double eta, Rng& rng,
                        std::span<const double> losses) {
  check_losses(losses, state.arms());
  const ProbVector p = softmax_from_losses(state.cumulative, eta);
  const Arm arm = sample_arm(p, rng);
  const double loss = observed(losses, arm);
  accumulate(state.cumulative, estimate_ix(Observation(arm, loss, p.weights()), gamma));
  ++state.round;
  return {arm, loss};
}

StepResult exp3_round(PolicyState& state, double eta, Rng& rng,
                      std::span<const double> losses) {
  check_losses(losses, state.arms());
  const ProbVector p = softmax_from_losses(state.cumulative, eta);
  const Arm arm = sample_arm(p, rng);
  const double loss = observed(losses, arm);
  accumulate(state.cumulative, estimate_importance(Observation(arm, loss, p.weights())));
  ++state.round;
  return {arm, loss};
}

std::pair<double, double> exp3ix_anytime_params(std::size_t t,
                                                std::size_t arms,
                                                double multiplier) {
  if (arms < 2) throw ConfigError("anytime schedule needs K >= 2");
  if (t < 1) throw ConfigError("rounds are numbered from 1");
  if (!(multiplier > 0.0)) throw ConfigError("multiplier must be positive");
  const double k = static_cast<double>(arms);
  const double eta =
      multiplier * std::sqrt(std::log(k) / (k * static_cast<double>(t)));
  return {eta, eta / 2.0};
}

ProbVector exp3p_distribution(const Exp3PState& state, double eta,
                              double gamma) {
  // Reward weights exp(eta R_i) are the loss softmax of -R.
  std::vector<double> neg(state.cumulative_reward.size());
  for (std::size_t i = 0; i < neg.size(); ++i) {
    neg[i] = -state.cumulative_reward[i];
  }
  const ProbVector q = softmax_from_losses(neg, eta);
  const double floor = gamma / static_cast<double>(neg.size());
  std::vector<double> p(neg.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = (1.0 - gamma) * q[i] + floor;
  }
  return ProbVector(std::move(p));
}

StepResult exp3p_round(Exp3PState& state, double eta, double gamma, double beta,
                       Rng& rng, std::span<const double> losses) {
  Exp3PParams{eta, gamma, beta}.validate();
  check_losses(losses, state.cumulative_reward.size());
  const ProbVector p = exp3p_distribution(state, eta, gamma);
  const Arm arm = sample_arm(p, rng);
  const double loss = observed(losses, arm);
  accumulate(state.cumulative_reward,
             estimate_biased_reward(Observation(arm, loss, p.weights()), beta));
  ++state.round;
  return {arm, loss};
}

ProbVector exp4ix_distribution(const Exp4State& state,
                               const ExpertAdvice& advice, double eta) {
  if (advice.experts() != state.expert_cumulative.size() ||
      advice.arms() != state.arms) {
    throw ConfigError("advice dimensions do not match the EXP4-IX state");
  }
  const ProbVector pi = softmax_from_losses(state.expert_cumulative, eta);
  std::vector<double> p(state.arms, 0.0);
  for (std::size_t n = 0; n < advice.experts(); ++n) {
    const auto row = advice.row(n);
    for (Arm i = 0; i < state.arms; ++i) p[i] += pi[n] * row[i];
  }
  return ProbVector(std::move(p));
}

StepResult exp4ix_round(Exp4State& state, const ExpertAdvice& advice,
                        double eta, double gamma, Rng& rng,
                        std::span<const double> losses) {
  check_losses(losses, state.arms);
  const ProbVector p = exp4ix_distribution(state, advice, eta);
  const Arm arm = sample_arm(p, rng);
  const double loss = observed(losses, arm);
  const auto est = estimate_ix(Observation(arm, loss, p.weights()), gamma);
  for (std::size_t n = 0; n < advice.experts(); ++n) {
    state.expert_cumulative[n] += advice.at(n, arm) * est[arm];
  }
  ++state.round;
  return {arm, loss};
}

std::vector<double> fixed_share_update(std::span<const double> weights,
                                       std::span<const double> estimates,
                                       double eta, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("switching rate alpha must lie in [0,1]");
  }
  if (weights.size() != estimates.size()) {
    throw ConfigError("weights and estimates differ in length");
  }
  const std::size_t k = weights.size();
  std::vector<double> v(k);
  for (std::size_t i = 0; i < k; ++i) {
    v[i] = weights[i] * std::exp(-eta * estimates[i]);
  }
  const double total = std::accumulate(v.begin(), v.end(), 0.0);
  const double share = alpha / static_cast<double>(k) * total;
  for (double& x : v) x = (1.0 - alpha) * x + share;
  return v;
}

StepResult exp3six_round(std::vector<double>& weights, double eta,
                         double gamma, double alpha, Rng& rng,
                         std::span<const double> losses) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("switching rate alpha must lie in [0,1]");
  }
  check_losses(losses, weights.size());
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw NumericError("Fixed-Share weights must be nonnegative and finite");
    }
    total += w;
  }
  if (!(total > 0.0)) throw NumericError("Fixed-Share weights vanished");
  std::vector<double> p(weights.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights[i] / total;
  const ProbVector dist(std::move(p));
  const Arm arm = sample_arm(dist, rng);
  const double loss = observed(losses, arm);
  const auto est = estimate_ix(Observation(arm, loss, dist.weights()), gamma);
  weights = fixed_share_update(weights, est, eta, alpha);
  const double mass = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& w : weights) w /= mass;
  return {arm, loss};
}

GraphStepResult exp3ix_graph_round(PolicyState& state,
                                   const FeedbackGraph& graph, double eta,
                                   double gamma, Rng& rng,
                                   std::span<const double> losses) {
  if (graph.nodes() != state.arms()) {
    throw ConfigError("feedback graph has " + std::to_string(graph.nodes()) +
                      " nodes but the policy has " +
                      std::to_string(state.arms()) + " arms");
  }
  check_losses(losses, state.arms());
  const ProbVector p = softmax_from_losses(state.cumulative, eta);
  const Arm arm = sample_arm(p, rng);
  GraphStepResult result{arm, observed(losses, arm),
                         realize_observations(graph, arm)};
  std::vector<ObservedLoss> seen;
  seen.reserve(result.observed.size());
  for (Arm j : result.observed) seen.push_back({j, observed(losses, j)});
  const auto o = observation_probs(graph, p.weights());
  accumulate(state.cumulative, estimate_graph_ix(seen, o, gamma));
  ++state.round;
  return result;
}

// --- Policy objects ---------------------------------------------------------

Exp3Policy::Exp3Policy(std::size_t arms, Schedule schedule)
    : state_(arms, schedule) {
  if (arms == 0) throw ConfigError("policy needs at least one arm");
  schedule.validate();
}

ProbVector Exp3Policy::distribution() const {
  return softmax_from_losses(state_.cumulative,
                             state_.schedule.eta(state_.round));
}

StepResult Exp3Policy::step(Rng& rng, std::span<const double> losses) {
  return exp3_round(state_, state_.schedule.eta(state_.round), rng, losses);
}

Exp3IxPolicy::Exp3IxPolicy(std::size_t arms, Schedule schedule)
    : state_(arms, schedule) {
  if (arms == 0) throw ConfigError("policy needs at least one arm");
  schedule.validate();
}

ProbVector Exp3IxPolicy::distribution() const {
  return softmax_from_losses(state_.cumulative,
                             state_.schedule.eta(state_.round));
}

StepResult Exp3IxPolicy::step(Rng& rng, std::span<const double> losses) {
  const std::size_t t = state_.round;
  return exp3ix_round(state_, state_.schedule.gamma(t),
                      state_.schedule.eta(t), rng, losses);
}

void Exp3PParams::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw ConfigError("EXP3.P eta must be positive");
  }
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw ConfigError("EXP3.P gamma must lie in [0,1]");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ConfigError("EXP3.P beta must be positive");
  }
}

Exp3PPolicy::Exp3PPolicy(std::size_t arms, Exp3PParams params)
    : params_(params), state_(arms) {
  if (arms == 0) throw ConfigError("policy needs at least one arm");
  params_.validate();
}

ProbVector Exp3PPolicy::distribution() const {
  return exp3p_distribution(state_, params_.eta, params_.gamma);
}

StepResult Exp3PPolicy::step(Rng& rng, std::span<const double> losses) {
  return exp3p_round(state_, params_.eta, params_.gamma, params_.beta, rng,
                     losses);
}

Exp4IxPolicy::Exp4IxPolicy(std::size_t arms, std::size_t experts,
                           Schedule schedule, AdviceProvider advice)
    : state_(arms, experts), schedule_(schedule), advice_(std::move(advice)) {
  if (arms == 0 || experts == 0) {
    throw ConfigError("EXP4-IX needs at least one arm and one expert");
  }
  if (!advice_) throw ConfigError("EXP4-IX needs an advice provider");
  schedule_.validate();
}

ExpertAdvice Exp4IxPolicy::advice_for_round() const {
  return advice_(state_.round);
}

ProbVector Exp4IxPolicy::distribution() const {
  return exp4ix_distribution(state_, advice_for_round(),
                             schedule_.eta(state_.round));
}

StepResult Exp4IxPolicy::step(Rng& rng, std::span<const double> losses) {
  const std::size_t t = state_.round;
  return exp4ix_round(state_, advice_for_round(), schedule_.eta(t),
                      schedule_.gamma(t), rng, losses);
}

Exp3SixPolicy::Exp3SixPolicy(std::size_t arms, Schedule schedule, double alpha)
    : weights_(arms, arms == 0 ? 0.0 : 1.0 / static_cast<double>(arms)),
      schedule_(schedule),
      alpha_(alpha) {
  if (arms == 0) throw ConfigError("policy needs at least one arm");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("switching rate alpha must lie in [0,1]");
  }
  schedule_.validate();
}

ProbVector Exp3SixPolicy::distribution() const {
  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  std::vector<double> p(weights_.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = weights_[i] / total;
  return ProbVector(std::move(p));
}

StepResult Exp3SixPolicy::step(Rng& rng, std::span<const double> losses) {
  const auto result = exp3six_round(weights_, schedule_.eta(round_),
                                    schedule_.gamma(round_), alpha_, rng,
                                    losses);
  ++round_;
  return result;
}

GraphExp3IxPolicy::GraphExp3IxPolicy(std::shared_ptr<const FeedbackGraph> graph,
                                     Schedule schedule)
    : graph_(std::move(graph)),
      state_(graph_ ? graph_->nodes() : 0, schedule) {
  if (!graph_) throw ConfigError("graph policy needs a feedback graph");
  schedule.validate();
}

ProbVector GraphExp3IxPolicy::distribution() const {
  return softmax_from_losses(state_.cumulative,
                             state_.schedule.eta(state_.round));
}

StepResult GraphExp3IxPolicy::step(Rng& rng, std::span<const double> losses) {
  const std::size_t t = state_.round;
  auto result = exp3ix_graph_round(state_, *graph_, state_.schedule.eta(t),
                                   state_.schedule.gamma(t), rng, losses);
  last_observed_ = std::move(result.observed);
  return {result.arm, result.loss};
}

}  // namespace ixbandit
