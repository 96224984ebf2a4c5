#include "ixbandit/estimators.hpp"

#include <cmath>
#include <string>

namespace ixbandit {
namespace {

void require_gamma(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("gamma must be nonnegative and finite");
  }
}

std::vector<double> single_entry(const Observation& obs, double value) {
  std::vector<double> out(obs.arms(), 0.0);
  out[obs.chosen_arm()] = value;
  return out;
}

}  // namespace

Observation::Observation(Arm chosen_arm, double observed_loss,
                         std::span<const double> probs)
    : chosen_(chosen_arm), loss_(observed_loss), probs_(probs) {
  ProbVector::validate(probs_);
  if (chosen_ >= probs_.size()) {
    throw ConfigError("chosen arm " + std::to_string(chosen_ + 1) +
                      " outside 1.." + std::to_string(probs_.size()));
  }
  if (!(loss_ >= 0.0 && loss_ <= 1.0)) {
    throw ConfigError("observed loss outside [0,1]");
  }
}

const char* to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Ix: return "ix";
    case EstimatorKind::IxAltA: return "ix-alt-a";
    case EstimatorKind::IxAltLog: return "ix-alt-log";
  }
  return "?";
}

double ix_alt_log_value(double loss, double prob, double gamma) {
  return std::log1p(2.0 * gamma * loss / prob) / (2.0 * gamma);
}

double estimator_value(EstimatorKind kind, double loss, double prob,
                       double gamma) {
  switch (kind) {
    case EstimatorKind::Ix: return ix_value(loss, prob, gamma);
    case EstimatorKind::IxAltA: return ix_alt_a_value(loss, prob, gamma);
    case EstimatorKind::IxAltLog: return ix_alt_log_value(loss, prob, gamma);
  }
  return 0.0;
}

std::vector<double> estimate_importance(const Observation& obs) {
  const double p = obs.sampling_prob();
  if (!(p > 0.0)) {
    throw NumericError("importance weighting with zero sampling probability");
  }
  return single_entry(obs, obs.observed_loss() / p);
}

std::vector<double> estimate_ix(const Observation& obs, double gamma) {
  require_gamma(gamma);
  const double p = obs.sampling_prob();
  if (!(p + gamma > 0.0)) {
    throw NumericError("IX estimate with p + gamma = 0 at the chosen arm");
  }
  return single_entry(obs, ix_value(obs.observed_loss(), p, gamma));
}

std::vector<double> estimate_biased_reward(const Observation& obs,
                                           double beta) {
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    throw ConfigError("beta must be nonnegative and finite");
  }
  const auto probs = obs.probs();
  std::vector<double> out(probs.size());
  for (Arm i = 0; i < probs.size(); ++i) {
    if (!(probs[i] > 0.0)) {
      throw NumericError("biased reward estimate needs every p_i > 0 (arm " +
                         std::to_string(i + 1) + ")");
    }
    out[i] = beta / probs[i];
  }
  const Arm chosen = obs.chosen_arm();
  out[chosen] += (1.0 - obs.observed_loss()) / probs[chosen];
  return out;
}

std::vector<double> estimate_ix_alt_a(const Observation& obs, double gamma) {
  require_gamma(gamma);
  const double p = obs.sampling_prob();
  const double l = obs.observed_loss();
  if (l == 0.0) return std::vector<double>(obs.arms(), 0.0);
  if (!(p + gamma * l > 0.0)) {
    throw NumericError("alternative IX estimate with p + gamma*l = 0");
  }
  return single_entry(obs, ix_alt_a_value(l, p, gamma));
}

std::vector<double> estimate_ix_alt_log(const Observation& obs, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError(
        "logarithmic estimate is undefined for gamma = 0; use the "
        "importance-weighted estimate");
  }
  const double p = obs.sampling_prob();
  if (!(p > 0.0)) {
    throw NumericError("logarithmic estimate with zero sampling probability");
  }
  return single_entry(obs, ix_alt_log_value(obs.observed_loss(), p, gamma));
}

std::vector<double> estimate(EstimatorKind kind, const Observation& obs,
                             double gamma) {
  switch (kind) {
    case EstimatorKind::Ix: return estimate_ix(obs, gamma);
    case EstimatorKind::IxAltA: return estimate_ix_alt_a(obs, gamma);
    case EstimatorKind::IxAltLog: return estimate_ix_alt_log(obs, gamma);
  }
  throw ConfigError("unknown estimator");
}

std::vector<double> estimate_graph_ix(std::span<const ObservedLoss> observed,
                                      std::span<const double> obs_probs,
                                      double gamma) {
  require_gamma(gamma);
  std::vector<double> out(obs_probs.size(), 0.0);
  for (double o : obs_probs) {
    if (!(o >= 0.0 && o <= 1.0)) {
      throw ConfigError("observation probability outside [0,1]");
    }
  }
  for (const auto& [arm, loss] : observed) {
    if (arm >= out.size()) throw ConfigError("observed arm out of range");
    if (!(loss >= 0.0 && loss <= 1.0)) {
      throw ConfigError("observed loss outside [0,1]");
    }
    const double denom = obs_probs[arm] + gamma;
    if (!(denom > 0.0)) {
      throw NumericError("graph IX estimate with o + gamma = 0 at arm " +
                         std::to_string(arm + 1));
    }
    out[arm] = loss / denom;
  }
  return out;
}

}  // namespace ixbandit
