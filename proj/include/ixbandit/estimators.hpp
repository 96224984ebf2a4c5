#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ixbandit/core.hpp"

namespace ixbandit {

// One round of bandit feedback: the arm drawn, its loss, and the distribution
// it was drawn from.
class Observation {
 public:
  Observation(Arm chosen_arm, double observed_loss,
              std::span<const double> probs);

  Arm chosen_arm() const { return chosen_; }
  double observed_loss() const { return loss_; }
  double sampling_prob() const { return probs_[chosen_]; }
  std::span<const double> probs() const { return probs_; }
  std::size_t arms() const { return probs_.size(); }

 private:
  Arm chosen_;
  double loss_;
  std::span<const double> probs_;
};

// A revealed (arm, loss) pair under graph feedback.
struct ObservedLoss {
  Arm arm;
  double loss;
};

enum class EstimatorKind { Ix, IxAltA, IxAltLog };

const char* to_string(EstimatorKind kind);

// Scalar kernels: the value an estimator assigns to an arm that was observed
// with loss `loss` while having probability `prob`. Unobserved arms get 0.
// Preconditions are enforced by the vector-valued wrappers below.
inline double ix_value(double loss, double prob, double gamma) {
  return loss / (prob + gamma);
}
inline double ix_alt_a_value(double loss, double prob, double gamma) {
  return loss / (prob + gamma * loss);
}
double ix_alt_log_value(double loss, double prob, double gamma);
double estimator_value(EstimatorKind kind, double loss, double prob,
                       double gamma);

// l_i / p_i at the chosen arm, 0 elsewhere.
std::vector<double> estimate_importance(const Observation& obs);

// l_i / (p_i + gamma) at the chosen arm, 0 elsewhere.
std::vector<double> estimate_ix(const Observation& obs, double gamma);

// Reward-game estimate r_i / p_i * 1{I = i} + beta / p_i with r = 1 - l.
// The bias term is added for every arm.
std::vector<double> estimate_biased_reward(const Observation& obs, double beta);

// l_i / (p_i + gamma * l_i) at the chosen arm.
std::vector<double> estimate_ix_alt_a(const Observation& obs, double gamma);

// log(1 + 2 gamma l_i / p_i) / (2 gamma) at the chosen arm; gamma must be > 0.
std::vector<double> estimate_ix_alt_log(const Observation& obs, double gamma);

std::vector<double> estimate(EstimatorKind kind, const Observation& obs,
                             double gamma);

// l_i / (o_i + gamma) for every revealed arm, 0 for the rest. `obs_probs` is
// the vector o of observation probabilities.
std::vector<double> estimate_graph_ix(std::span<const ObservedLoss> observed,
                                      std::span<const double> obs_probs,
                                      double gamma);

}  // namespace ixbandit
