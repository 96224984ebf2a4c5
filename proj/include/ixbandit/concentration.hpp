#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "ixbandit/core.hpp"
#include "ixbandit/estimators.hpp"
#include "ixbandit/graphs.hpp"

namespace ixbandit {

// Monte Carlo checks of the concentration properties of IX-type estimates.
// A process fixes how the sampling distributions p_t and the losses l_t are
// generated; both may depend on the past.

enum class LossProcess {
  Zero,          // every loss is 0
  IidBernoulli,  // per-replication means ~ U[0,1], Bernoulli draws
  IidUniform,    // l_{t,i} ~ U[0,1]
  AdaptiveSpiky  // loss 1 on the arm with the lowest cumulative estimate
};

enum class SamplingRule {
  Uniform,            // p_t uniform
  ExponentialWeights  // p_t proportional to exp(-eta_t * cumulative estimate)
};

const char* to_string(LossProcess process);
const char* to_string(SamplingRule rule);

struct ProcessSpec {
  std::size_t arms = 2;
  std::size_t horizon = 1;
  LossProcess losses = LossProcess::IidBernoulli;
  SamplingRule sampling = SamplingRule::ExponentialWeights;
  // Side-observation graph; null means plain bandit feedback. With a graph the
  // estimate is always l / (o + gamma).
  std::shared_ptr<const FeedbackGraph> graph;

  void validate() const;
};

struct MonteCarloOptions {
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct MonteCarloEstimate {
  double value = 0.0;   // violation frequency or mean
  double std_error = 0.0;  // standard error used by the pass decision
  std::size_t replications = 0;
  double threshold = 0.0;
  bool pass = false;
};

// log(K/delta) / (2 gamma)
double corollary1_threshold(std::size_t arms, double gamma, double delta);

// max_i sum_t (l~_{t,i} - l_{t,i}) for each replication, with a constant
// gamma. Exponential-weights sampling uses eta = 2 gamma.
std::vector<double> corollary1_deviations(const ProcessSpec& process,
                                          double gamma,
                                          std::size_t replications,
                                          EstimatorKind estimator,
                                          MonteCarloOptions options = {});

// Fraction of samples above `threshold`; passes when it does not exceed
// delta + 3 sqrt(delta (1 - delta) / n).
MonteCarloEstimate frequency_check(std::span<const double> samples,
                                   double threshold, double delta);

MonteCarloEstimate verify_corollary1(const ProcessSpec& process, double gamma,
                                     double delta, std::size_t replications,
                                     EstimatorKind estimator = EstimatorKind::Ix,
                                     MonteCarloOptions options = {});

// What a weight rule may look at in round t: everything fixed before I_t.
struct WeightContext {
  std::size_t round;
  double gamma;
  double eta;
  std::span<const double> probs;
  std::span<const double> cumulative;
};

// Fills alpha_{t,i}. Must satisfy 0 <= alpha_{t,i} <= 2 gamma_t.
using WeightRule = std::function<void(const WeightContext&, std::span<double>)>;

WeightRule zero_weights();
// 2 gamma_t on arm j, 0 elsewhere.
WeightRule single_arm_weights(Arm arm);
// eta_t / 2 + gamma_t on every arm.
WeightRule regret_proof_weights();
// 2 gamma_t on every arm.
WeightRule full_weights();

// Frequency of sum_t sum_i alpha_{t,i} (l~_{t,i} - l_{t,i}) > log(1/delta)
// under a non-increasing gamma schedule. Graph feedback is rejected.
MonteCarloEstimate verify_lemma1(const WeightRule& weights,
                                 const Schedule& schedule,
                                 const ProcessSpec& process, double delta,
                                 std::size_t replications,
                                 EstimatorKind estimator = EstimatorKind::Ix,
                                 MonteCarloOptions options = {});

// Monte Carlo mean of Z_T = exp(sum_t sum_i alpha_{t,i} (l~_{t,i} - l_{t,i}))
// with alpha = 2 gamma on `arm` only, or on every arm when `arm` is empty.
// Passes when the mean is at most 1 + 3 standard errors.
MonteCarloEstimate verify_supermartingale(
    const ProcessSpec& process, double gamma, std::size_t replications,
    EstimatorKind estimator = EstimatorKind::Ix,
    std::optional<Arm> arm = std::nullopt, MonteCarloOptions options = {});

}  // namespace ixbandit
