#include "ixbandit/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

namespace ixbandit {

LossMatrix::LossMatrix(std::size_t horizon, std::size_t arms)
    : LossMatrix(horizon, arms, std::vector<double>(horizon * arms, 0.0)) {}

LossMatrix::LossMatrix(std::size_t horizon, std::size_t arms,
                       std::vector<double> values)
    : horizon_(horizon), arms_(arms), values_(std::move(values)) {
  if (horizon_ == 0 || arms_ == 0) {
    throw ConfigError("loss matrix needs at least one round and one arm");
  }
  if (values_.size() != horizon_ * arms_) {
    std::ostringstream msg;
    msg << "loss matrix declared " << horizon_ << "x" << arms_ << " but holds "
        << values_.size() << " values";
    throw ConfigError(msg.str());
  }
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double v = values_[k];
    if (!(v >= 0.0 && v <= 1.0)) {
      std::ostringstream msg;
      msg << "loss at round " << k / arms_ + 1 << ", arm " << k % arms_ + 1
          << " is " << v << ", outside [0,1]";
      throw ConfigError(msg.str());
    }
  }
}

std::span<const double> LossMatrix::row(std::size_t t) const {
  if (t >= horizon_) {
    throw ConfigError("round " + std::to_string(t + 1) + " beyond horizon " +
                      std::to_string(horizon_));
  }
  return std::span<const double>(values_).subspan(t * arms_, arms_);
}

void LossMatrix::set(std::size_t t, Arm i, double loss) {
  if (t >= horizon_ || i >= arms_) throw ConfigError("loss index out of range");
  if (!(loss >= 0.0 && loss <= 1.0)) throw ConfigError("loss outside [0,1]");
  values_[t * arms_ + i] = loss;
}

ProbVector::ProbVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  validate(weights_);
}

ProbVector ProbVector::uniform(std::size_t arms) {
  if (arms == 0) throw ConfigError("distribution over zero arms");
  return ProbVector(std::vector<double>(arms, 1.0 / static_cast<double>(arms)));
}

ProbVector ProbVector::point_mass(std::size_t arms, Arm arm) {
  if (arm >= arms) throw ConfigError("point mass outside the arm range");
  std::vector<double> w(arms, 0.0);
  w[arm] = 1.0;
  return ProbVector(std::move(w));
}

void ProbVector::validate(std::span<const double> weights) {
  if (weights.empty()) throw ConfigError("empty probability vector");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) {
      throw ConfigError("probability entry " + std::to_string(w) +
                        " is negative or non-finite");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > kProbTolerance) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "probabilities sum to " << sum << ", not 1";
    throw ConfigError(msg.str());
  }
}

Schedule Schedule::fixed(double eta, double gamma, double multiplier) {
  Schedule s{ScheduleKind::Fixed, eta, gamma, multiplier};
  s.validate();
  return s;
}

Schedule Schedule::anytime(double base_eta, double base_gamma,
                           double multiplier) {
  Schedule s{ScheduleKind::Anytime, base_eta, base_gamma, multiplier};
  s.validate();
  return s;
}

double Schedule::eta(std::size_t t) const {
  const double v = base_eta * multiplier;
  return kind == ScheduleKind::Fixed ? v : v / std::sqrt(static_cast<double>(t));
}

double Schedule::gamma(std::size_t t) const {
  const double v = base_gamma * multiplier;
  return kind == ScheduleKind::Fixed ? v : v / std::sqrt(static_cast<double>(t));
}

void Schedule::validate() const {
  if (!(base_eta > 0.0) || !std::isfinite(base_eta)) {
    throw ConfigError("schedule eta must be positive and finite");
  }
  if (!(base_gamma >= 0.0) || !std::isfinite(base_gamma)) {
    throw ConfigError("schedule gamma must be nonnegative and finite");
  }
  if (!(multiplier > 0.0) || !std::isfinite(multiplier)) {
    throw ConfigError("schedule multiplier must be positive and finite");
  }
}

Arm sample_arm(const ProbVector& p, Rng& rng) {
  const auto w = p.weights();
  const double u = rng.uniform();
  double cum = 0.0;
  Arm last_positive = 0;
  for (Arm i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last_positive = i;
    cum += w[i];
    if (u < cum) return i;
  }
  // Only reachable when rounding leaves the total a hair below u.
  return last_positive;
}

Arm sample_arm(std::span<const double> p, Rng& rng) {
  return sample_arm(ProbVector(std::vector<double>(p.begin(), p.end())), rng);
}

ProbVector softmax_from_losses(std::span<const double> cumulative, double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) {
    throw NumericError("softmax needs a positive finite eta");
  }
  if (cumulative.empty()) throw ConfigError("softmax over zero arms");
  double lo = cumulative[0];
  for (double v : cumulative) {
    if (!std::isfinite(v)) throw NumericError("non-finite cumulative loss");
    lo = std::min(lo, v);
  }
  std::vector<double> w(cumulative.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(-eta * (cumulative[i] - lo));
    total += w[i];
  }
  for (double& x : w) x /= total;
  return ProbVector(std::move(w));
}

Arm argmin(std::span<const double> values) {
  Arm best = 0;
  for (Arm i = 1; i < values.size(); ++i) {
    if (values[i] < values[best]) best = i;
  }
  return best;
}

Arm argmax(std::span<const double> values) {
  Arm best = 0;
  for (Arm i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

}  // namespace ixbandit
