#include "ixbandit/comparators.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

namespace ixbandit {

void RunRecord::validate() const {
  if (incurred.size() != arms.size()) {
    throw ConfigError("run record: arm and loss traces differ in length");
  }
  if (!probs.empty() && probs.size() != arms.size()) {
    throw ConfigError("run record: distribution trace has the wrong length");
  }
  if (losses) {
    if (losses->horizon() != arms.size()) {
      throw ConfigError("run record: loss rows do not cover the trace");
    }
    for (std::size_t t = 0; t < arms.size(); ++t) {
      if (arms[t] >= losses->arms() ||
          losses->at(t, arms[t]) != incurred[t]) {
        throw ConfigError("run record: incurred loss at round " +
                          std::to_string(t + 1) +
                          " disagrees with the stored loss row");
      }
    }
  }
}

namespace {

void check_dims(const RunRecord& record, const LossMatrix& losses) {
  if (record.horizon() != losses.horizon()) {
    throw ConfigError("record covers " + std::to_string(record.horizon()) +
                      " rounds but the loss matrix has " +
                      std::to_string(losses.horizon()));
  }
  for (Arm a : record.arms) {
    if (a >= losses.arms()) throw ConfigError("recorded arm out of range");
  }
}

double learner_loss(const RunRecord& record, const LossMatrix& losses) {
  double total = 0.0;
  for (std::size_t t = 0; t < record.horizon(); ++t) {
    total += losses.at(t, record.arms[t]);
  }
  return total;
}

}  // namespace

FixedRegret regret_fixed(const RunRecord& record, const LossMatrix& losses) {
  check_dims(record, losses);
  std::vector<double> totals(losses.arms(), 0.0);
  for (std::size_t t = 0; t < losses.horizon(); ++t) {
    for (Arm i = 0; i < losses.arms(); ++i) totals[i] += losses.at(t, i);
  }
  FixedRegret r;
  r.best_arm = argmin(totals);
  r.best_loss = totals[r.best_arm];
  r.learner_loss = learner_loss(record, losses);
  r.regret = r.learner_loss - r.best_loss;
  return r;
}

double regret_experts(const RunRecord& record, const LossMatrix& losses,
                      std::span<const ExpertAdvice> advice) {
  check_dims(record, losses);
  if (advice.size() != losses.horizon()) {
    throw ConfigError("advice sequence length differs from the horizon");
  }
  const std::size_t experts = advice.empty() ? 0 : advice[0].experts();
  std::vector<double> totals(experts, 0.0);
  for (std::size_t t = 0; t < advice.size(); ++t) {
    if (advice[t].experts() != experts || advice[t].arms() != losses.arms()) {
      throw ConfigError("advice at round " + std::to_string(t + 1) +
                        " has inconsistent dimensions");
    }
    for (std::size_t n = 0; n < experts; ++n) {
      double expected = 0.0;
      for (Arm i = 0; i < losses.arms(); ++i) {
        expected += advice[t].at(n, i) * losses.at(t, i);
      }
      totals[n] += expected;
    }
  }
  return learner_loss(record, losses) - totals[argmin(totals)];
}

double pseudo_regret(std::span<const Arm> arms,
                     std::span<const std::vector<double>> means) {
  if (arms.size() != means.size()) {
    throw ConfigError("pseudo-regret: trace and mean rows differ in length");
  }
  if (means.empty()) return 0.0;
  std::vector<double> totals(means[0].size(), 0.0);
  double learner = 0.0;
  for (std::size_t t = 0; t < arms.size(); ++t) {
    if (means[t].size() != totals.size() || arms[t] >= totals.size()) {
      throw ConfigError("pseudo-regret: inconsistent mean rows");
    }
    learner += means[t][arms[t]];
    for (std::size_t i = 0; i < totals.size(); ++i) totals[i] += means[t][i];
  }
  return learner - totals[argmin(totals)];
}

SwitchingValue best_switching_value(const LossMatrix& losses,
                                    std::size_t switches, bool with_witness) {
  const std::size_t horizon = losses.horizon();
  const std::size_t k = losses.arms();
  if (switches > horizon - 1) {
    throw ConfigError("switch budget " + std::to_string(switches) +
                      " exceeds T - 1 = " + std::to_string(horizon - 1));
  }
  const std::size_t levels = switches + 1;
  // cost[s * k + i]: best loss so far ending on arm i with at most s switches.
  std::vector<double> cost(levels * k);
  std::vector<double> next(levels * k);
  std::vector<double> level_min(levels);
  std::vector<Arm> level_argmin(levels);
  // Witness bookkeeping: whether (t, s, i) was reached by switching, and the
  // arm switched from at (t - 1, s - 1).
  std::vector<std::uint8_t> switched;
  std::vector<Arm> came_from;
  if (with_witness) {
    switched.assign(horizon * levels * k, 0);
    came_from.assign(horizon * levels, 0);
  }

  for (std::size_t s = 0; s < levels; ++s) {
    for (Arm i = 0; i < k; ++i) cost[s * k + i] = losses.at(0, i);
  }
  for (std::size_t t = 1; t < horizon; ++t) {
    for (std::size_t s = 0; s < levels; ++s) {
      const std::span<const double> row(cost.data() + s * k, k);
      level_argmin[s] = argmin(row);
      level_min[s] = row[level_argmin[s]];
    }
    for (std::size_t s = 0; s < levels; ++s) {
      for (Arm i = 0; i < k; ++i) {
        const double stay = cost[s * k + i];
        double prev = stay;
        if (s > 0 && level_min[s - 1] < stay) {
          prev = level_min[s - 1];
          if (with_witness) switched[(t * levels + s) * k + i] = 1;
        }
        next[s * k + i] = losses.at(t, i) + prev;
      }
      if (with_witness && s > 0) came_from[t * levels + s] = level_argmin[s - 1];
    }
    cost.swap(next);
  }

  const std::span<const double> top(cost.data() + switches * k, k);
  Arm arm = argmin(top);
  SwitchingValue result;
  result.value = top[arm];
  if (!with_witness) return result;

  result.witness.resize(horizon);
  std::size_t s = switches;
  for (std::size_t t = horizon; t-- > 0;) {
    result.witness[t] = arm;
    if (t > 0 && switched[(t * levels + s) * k + arm]) {
      arm = came_from[t * levels + s];
      --s;
    }
  }
  result.switches = count_switches(result.witness);
  return result;
}

std::size_t count_switches(std::span<const Arm> sequence) {
  std::size_t n = 0;
  for (std::size_t t = 1; t < sequence.size(); ++t) {
    n += sequence[t] != sequence[t - 1] ? 1 : 0;
  }
  return n;
}

double switching_class_size_bound(std::size_t arms, std::size_t horizon,
                                  std::size_t switches) {
  const double k = static_cast<double>(arms);
  if (switches == 0) return k;
  const double s = static_cast<double>(switches);
  const double t = static_cast<double>(horizon);
  return std::pow(k, s + 1.0) * std::pow(std::numbers::e * t / s, s);
}

double switching_class_size(std::size_t arms, std::size_t horizon,
                            std::size_t switches) {
  if (horizon == 0) throw ConfigError("horizon must be positive");
  const double k = static_cast<double>(arms);
  double total = 0.0;
  double binom = 1.0;  // binom(T-1, s)
  double power = 1.0;  // (K-1)^s
  for (std::size_t s = 0; s <= switches && s <= horizon - 1; ++s) {
    if (s > 0) {
      binom *= static_cast<double>(horizon - s) / static_cast<double>(s);
      power *= k - 1.0;
    }
    total += binom * power;
  }
  return k * total;
}

}  // namespace ixbandit
