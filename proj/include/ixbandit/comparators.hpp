#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "ixbandit/core.hpp"
#include "ixbandit/policies.hpp"

namespace ixbandit {

// Per-round trace of one seeded run.
struct RunRecord {
  std::vector<Arm> arms;         // I_t
  std::vector<double> incurred;  // l_{t, I_t}
  std::optional<LossMatrix> losses;
  std::vector<ProbVector> probs;  // empty unless requested

  std::size_t horizon() const { return arms.size(); }
  void validate() const;
};

struct FixedRegret {
  double regret = 0.0;
  double learner_loss = 0.0;
  double best_loss = 0.0;
  Arm best_arm = 0;  // lowest index among ties
};

// Realized regret against the best fixed arm in hindsight.
FixedRegret regret_fixed(const RunRecord& record, const LossMatrix& losses);

// Realized regret against the best expert; `advice[t]` is the advice of round
// t (0-based).
double regret_experts(const RunRecord& record, const LossMatrix& losses,
                      std::span<const ExpertAdvice> advice);

// sum_t mu_{t,I_t} - min_i sum_t mu_{t,i}, for processes with known means.
// `means` holds one length-K row per round.
double pseudo_regret(std::span<const Arm> arms,
                     std::span<const std::vector<double>> means);

struct SwitchingValue {
  double value = 0.0;
  std::vector<Arm> witness;  // empty when not requested
  std::size_t switches = 0;  // switches used by the witness
};

// Minimum total loss over action sequences with at most `switches` changes of
// arm, by dynamic programming over (round, switches used, arm). Witness ties
// go to the lowest final arm, then to staying over switching.
SwitchingValue best_switching_value(const LossMatrix& losses,
                                    std::size_t switches,
                                    bool with_witness = true);

// Number of switches in a sequence.
std::size_t count_switches(std::span<const Arm> sequence);

// K^{S+1} (eT/S)^S for S >= 1 and K for S = 0.
double switching_class_size_bound(std::size_t arms, std::size_t horizon,
                                  std::size_t switches);

// Exact |C(S)| = K sum_{s<=S} binom(T-1, s) (K-1)^s, as a double.
double switching_class_size(std::size_t arms, std::size_t horizon,
                            std::size_t switches);

}  // namespace ixbandit
