#include "ixbandit/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <thread>

#include "ixbandit/parallel.hpp"

namespace ixbandit {
namespace {

constexpr std::uint64_t kMeansTag = 1;
constexpr std::uint64_t kLossTag = 2;
constexpr std::uint64_t kDrawTag = 3;

// Everything the learner-side process has produced in round t.
struct RoundView {
  std::size_t t;
  double gamma;
  double eta;
  std::span<const double> probs;
  std::span<const double> losses;
  std::span<const double> estimates;  // zero outside `observed`
  std::span<const double> cumulative;  // before this round's update
  std::span<const Arm> observed;
};

// One replication of a process. p_t and l_t are fixed before I_t is drawn.
class ProcessRun {
 public:
  ProcessRun(const ProcessSpec& spec, EstimatorKind estimator, Rng rng)
      : spec_(spec),
        estimator_(estimator),
        loss_stream_(rng.derive(kLossTag)),
        draw_stream_(rng.derive(kDrawTag)),
        cumulative_(spec.arms, 0.0),
        weights_(spec.arms, 1.0),
        probs_(spec.arms, 1.0 / static_cast<double>(spec.arms)),
        losses_(spec.arms, 0.0),
        estimates_(spec.arms, 0.0),
        means_(spec.arms, 0.0) {
    if (spec.losses == LossProcess::IidBernoulli) {
      const Rng mean_stream = rng.derive(kMeansTag);
      for (Arm i = 0; i < spec.arms; ++i) {
        means_[i] = Rng::to_unit(mean_stream.at(i));
      }
    }
  }

  template <class GammaAt, class EtaAt, class Visit>
  void run(GammaAt gamma_at, EtaAt eta_at, Visit visit) {
    const std::size_t k = spec_.arms;
    for (std::size_t t = 1; t <= spec_.horizon; ++t) {
      const double gamma = gamma_at(t);
      const double eta = eta_at(t);
      update_probs(eta);
      draw_losses(t);
      const Arm arm = draw_arm(t);

      for (Arm j : observed_) estimates_[j] = 0.0;
      observed_.clear();
      if (spec_.graph) {
        const auto out = spec_.graph->out_neighbors(arm);
        observed_.assign(out.begin(), out.end());
        observed_.push_back(arm);
        const auto o = observation_probs(*spec_.graph, probs_);
        for (Arm j : observed_) estimates_[j] = losses_[j] / (o[j] + gamma);
      } else {
        observed_.push_back(arm);
        estimates_[arm] =
            losses_[arm] == 0.0
                ? 0.0
                : estimator_value(estimator_, losses_[arm], probs_[arm], gamma);
      }

      visit(RoundView{t, gamma, eta, probs_, losses_, estimates_, cumulative_,
                      observed_});

      for (Arm j : observed_) {
        cumulative_[j] += estimates_[j];
        if (incremental_) weights_[j] *= std::exp(-eta * estimates_[j]);
      }
      (void)k;
    }
  }

 private:
  void update_probs(double eta) {
    const std::size_t k = spec_.arms;
    if (spec_.sampling == SamplingRule::Uniform) return;
    if (!incremental_ || eta != cached_eta_) refresh_weights(eta);
    double total = 0.0;
    for (double w : weights_) total += w;
    if (total < 1e-150) {
      refresh_weights(eta);
      total = 0.0;
      for (double w : weights_) total += w;
    }
    for (Arm i = 0; i < k; ++i) probs_[i] = weights_[i] / total;
  }

  void refresh_weights(double eta) {
    const double lo = *std::min_element(cumulative_.begin(), cumulative_.end());
    for (Arm i = 0; i < spec_.arms; ++i) {
      weights_[i] = std::exp(-eta * (cumulative_[i] - lo));
    }
    cached_eta_ = eta;
    incremental_ = true;
  }

  void draw_losses(std::size_t t) {
    const std::size_t k = spec_.arms;
    switch (spec_.losses) {
      case LossProcess::Zero:
        break;
      case LossProcess::IidBernoulli:
        for (Arm i = 0; i < k; ++i) {
          losses_[i] = Rng::to_unit(loss_stream_.at(t * k + i)) < means_[i];
        }
        break;
      case LossProcess::IidUniform:
        for (Arm i = 0; i < k; ++i) {
          losses_[i] = Rng::to_unit(loss_stream_.at(t * k + i));
        }
        break;
      case LossProcess::AdaptiveSpiky: {
        const Arm target = argmin(cumulative_);
        for (Arm i = 0; i < k; ++i) losses_[i] = i == target ? 1.0 : 0.0;
        break;
      }
    }
  }

  Arm draw_arm(std::size_t t) const {
    const double u = Rng::to_unit(draw_stream_.at(t));
    double cum = 0.0;
    Arm last = 0;
    for (Arm i = 0; i < spec_.arms; ++i) {
      if (probs_[i] <= 0.0) continue;
      last = i;
      cum += probs_[i];
      if (u < cum) return i;
    }
    return last;
  }

  const ProcessSpec& spec_;
  EstimatorKind estimator_;
  Rng loss_stream_;
  Rng draw_stream_;
  std::vector<double> cumulative_;
  std::vector<double> weights_;
  std::vector<double> probs_;
  std::vector<double> losses_;
  std::vector<double> estimates_;
  std::vector<double> means_;
  std::vector<Arm> observed_;
  double cached_eta_ = std::numeric_limits<double>::quiet_NaN();
  bool incremental_ = false;
};

void check_gamma_for(EstimatorKind estimator, double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw ConfigError("concentration checks need gamma > 0");
  }
  (void)estimator;
}

void check_replications(std::size_t replications) {
  if (replications == 0) throw ConfigError("need at least one replication");
}

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ConfigError("delta must lie in (0,1)");
  }
}

}  // namespace

const char* to_string(LossProcess process) {
  switch (process) {
    case LossProcess::Zero: return "zero";
    case LossProcess::IidBernoulli: return "iid-bernoulli";
    case LossProcess::IidUniform: return "iid-uniform";
    case LossProcess::AdaptiveSpiky: return "adaptive-spiky";
  }
  return "?";
}

const char* to_string(SamplingRule rule) {
  switch (rule) {
    case SamplingRule::Uniform: return "uniform";
    case SamplingRule::ExponentialWeights: return "exp-weights";
  }
  return "?";
}

void ProcessSpec::validate() const {
  if (arms == 0) throw ConfigError("process needs at least one arm");
  if (horizon == 0) throw ConfigError("process needs a positive horizon");
  if (graph && graph->nodes() != arms) {
    throw ConfigError("process graph has " + std::to_string(graph->nodes()) +
                      " nodes for " + std::to_string(arms) + " arms");
  }
}

double corollary1_threshold(std::size_t arms, double gamma, double delta) {
  check_delta(delta);
  if (!(gamma > 0.0)) throw ConfigError("threshold needs gamma > 0");
  return std::log(static_cast<double>(arms) / delta) / (2.0 * gamma);
}

std::vector<double> corollary1_deviations(const ProcessSpec& process,
                                          double gamma,
                                          std::size_t replications,
                                          EstimatorKind estimator,
                                          MonteCarloOptions options) {
  process.validate();
  check_gamma_for(estimator, gamma);
  check_replications(replications);
  if (process.graph && estimator != EstimatorKind::Ix) {
    throw ConfigError("graph feedback supports only the standard IX estimate");
  }
  std::vector<double> samples(replications);
  parallel_for(replications, options.threads, [&](std::size_t r) {
    ProcessRun run(process, estimator, Rng(options.seed, r));
    std::vector<double> dev(process.arms, 0.0);
    run.run([&](std::size_t) { return gamma; },
            [&](std::size_t) { return 2.0 * gamma; },
            [&](const RoundView& v) {
              for (Arm i = 0; i < dev.size(); ++i) {
                dev[i] += v.estimates[i] - v.losses[i];
              }
            });
    samples[r] = *std::max_element(dev.begin(), dev.end());
  });
  return samples;
}

MonteCarloEstimate frequency_check(std::span<const double> samples,
                                   double threshold, double delta) {
  check_delta(delta);
  check_replications(samples.size());
  std::size_t violations = 0;
  for (double s : samples) violations += s > threshold ? 1 : 0;
  const double n = static_cast<double>(samples.size());
  MonteCarloEstimate out;
  out.replications = samples.size();
  out.value = static_cast<double>(violations) / n;
  out.std_error = std::sqrt(delta * (1.0 - delta) / n);
  out.threshold = threshold;
  out.pass = out.value <= delta + 3.0 * out.std_error;
  return out;
}

MonteCarloEstimate verify_corollary1(const ProcessSpec& process, double gamma,
                                     double delta, std::size_t replications,
                                     EstimatorKind estimator,
                                     MonteCarloOptions options) {
  check_delta(delta);
  const auto samples =
      corollary1_deviations(process, gamma, replications, estimator, options);
  return frequency_check(samples,
                         corollary1_threshold(process.arms, gamma, delta),
                         delta);
}

WeightRule zero_weights() {
  return [](const WeightContext&, std::span<double> alpha) {
    std::fill(alpha.begin(), alpha.end(), 0.0);
  };
}

WeightRule single_arm_weights(Arm arm) {
  return [arm](const WeightContext& ctx, std::span<double> alpha) {
    std::fill(alpha.begin(), alpha.end(), 0.0);
    if (arm < alpha.size()) alpha[arm] = 2.0 * ctx.gamma;
  };
}

WeightRule regret_proof_weights() {
  return [](const WeightContext& ctx, std::span<double> alpha) {
    std::fill(alpha.begin(), alpha.end(), ctx.eta / 2.0 + ctx.gamma);
  };
}

WeightRule full_weights() {
  return [](const WeightContext& ctx, std::span<double> alpha) {
    std::fill(alpha.begin(), alpha.end(), 2.0 * ctx.gamma);
  };
}

MonteCarloEstimate verify_lemma1(const WeightRule& weights,
                                 const Schedule& schedule,
                                 const ProcessSpec& process, double delta,
                                 std::size_t replications,
                                 EstimatorKind estimator,
                                 MonteCarloOptions options) {
  process.validate();
  schedule.validate();
  check_delta(delta);
  check_replications(replications);
  if (!weights) throw ConfigError("missing weight rule");
  if (process.graph) {
    throw ConfigError(
        "the weighted concentration bound does not cover graph estimates; "
        "use the per-arm check");
  }
  if (!(schedule.gamma(1) > 0.0)) {
    throw ConfigError("weighted concentration check needs gamma_t > 0");
  }
  std::vector<double> samples(replications);
  parallel_for(replications, options.threads, [&](std::size_t r) {
    ProcessRun run(process, estimator, Rng(options.seed, r));
    std::vector<double> alpha(process.arms);
    double total = 0.0;
    run.run([&](std::size_t t) { return schedule.gamma(t); },
            [&](std::size_t t) { return schedule.eta(t); },
            [&](const RoundView& v) {
              weights(WeightContext{v.t, v.gamma, v.eta, v.probs, v.cumulative},
                      alpha);
              const double cap = 2.0 * v.gamma * (1.0 + 1e-12);
              for (Arm i = 0; i < alpha.size(); ++i) {
                if (!(alpha[i] >= 0.0 && alpha[i] <= cap)) {
                  throw ConfigError("weight rule gave alpha = " +
                                    std::to_string(alpha[i]) + " at round " +
                                    std::to_string(v.t) +
                                    ", outside [0, 2 gamma_t]");
                }
                total += alpha[i] * (v.estimates[i] - v.losses[i]);
              }
            });
    samples[r] = total;
  });
  return frequency_check(samples, std::log(1.0 / delta), delta);
}

MonteCarloEstimate verify_supermartingale(const ProcessSpec& process,
                                          double gamma,
                                          std::size_t replications,
                                          EstimatorKind estimator,
                                          std::optional<Arm> arm,
                                          MonteCarloOptions options) {
  process.validate();
  check_gamma_for(estimator, gamma);
  check_replications(replications);
  if (arm && *arm >= process.arms) throw ConfigError("arm out of range");
  if (process.graph && !arm) {
    throw ConfigError(
        "graph estimates only admit the single-arm supermartingale");
  }
  if (process.graph && estimator != EstimatorKind::Ix) {
    throw ConfigError("graph feedback supports only the standard IX estimate");
  }
  const double beta = 2.0 * gamma;
  std::vector<double> z(replications);
  parallel_for(replications, options.threads, [&](std::size_t r) {
    ProcessRun run(process, estimator, Rng(options.seed, r));
    double log_z = 0.0;
    run.run([&](std::size_t) { return gamma; },
            [&](std::size_t) { return beta; },
            [&](const RoundView& v) {
              if (arm) {
                log_z += beta * (v.estimates[*arm] - v.losses[*arm]);
              } else {
                for (Arm i = 0; i < v.estimates.size(); ++i) {
                  log_z += beta * (v.estimates[i] - v.losses[i]);
                }
              }
            });
    z[r] = std::exp(log_z);
  });
  const double n = static_cast<double>(replications);
  double mean = 0.0;
  for (double v : z) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : z) ss += (v - mean) * (v - mean);
  MonteCarloEstimate out;
  out.replications = replications;
  out.value = mean;
  out.std_error = replications > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  out.threshold = 1.0;
  out.pass = mean <= 1.0 + 3.0 * out.std_error;
  return out;
}

}  // namespace ixbandit
