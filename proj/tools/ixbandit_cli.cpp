// ixbandit command-line harness.
//
//   ixbandit simulate config.json [--seed N] [--runs N] [--threads N] [--out DIR]
//   ixbandit sweep [--horizon T] [--runs N] ...
//   ixbandit verify [--check corollary|lemma|supermartingale] [--grid] ...
//   ixbandit bounds --arms K --horizon T [--delta d] [--experts N] ...
//   ixbandit best-seq losses.csv [--switches S]...
//
// Exit codes: 0 success, 1 configuration error, 2 runtime or numeric error,
// 3 verification failure.

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "ixbandit/bounds.hpp"
#include "ixbandit/comparators.hpp"
#include "ixbandit/concentration.hpp"
#include "ixbandit/environments.hpp"
#include "ixbandit/graphs.hpp"
#include "ixbandit/runner.hpp"

namespace {

using namespace ixbandit;

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitVerify = 3;

struct RunFlags {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::size_t> threads;
  std::optional<std::string> out;
  std::optional<std::string> checkpoints;
  bool no_plot = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--seed", f.seed, "Base seed");
  cmd->add_option("--runs", f.runs, "Independent runs per (policy, multiplier)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", f.out, "Output directory");
  cmd->add_option("--checkpoints", f.checkpoints,
                  "Comma-separated rounds at which regret is reported");
  cmd->add_flag("--no-plot", f.no_plot, "Skip the SVG figure");
}

std::vector<std::size_t> parse_checkpoints(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos != item.size() || item.empty()) {
      throw ConfigError("--checkpoints: '" + item + "' is not a round number");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void apply_flags(ExperimentConfig& cfg, const RunFlags& f) {
  if (f.seed) cfg.seed = *f.seed;
  if (f.runs) cfg.runs = *f.runs;
  if (f.threads) cfg.threads = *f.threads;
  if (f.out) cfg.output_dir = *f.out;
  if (f.checkpoints) cfg.checkpoints = parse_checkpoints(*f.checkpoints);
  cfg.validate();
}

void print_summary(const RunSummary& summary) {
  std::printf("%-14s %12s %10s %14s %12s %5s\n", "policy", "multiplier",
              "checkpoint", "mean_regret", "std", "n");
  for (const auto& a : summary.aggregate) {
    std::printf("%-14s %12.4g %10zu %14.2f %12.2f %5zu\n", a.policy.c_str(),
                a.multiplier, a.checkpoint, a.mean, a.std, a.n);
  }
}

int run_and_report(const ExperimentConfig& cfg, bool plot) {
  const ExperimentResult result = run_experiment(cfg);
  const auto files = emit_csv(result.summary, cfg.output_dir);
  print_summary(result.summary);
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  if (plot) {
    const auto svg = std::filesystem::path(cfg.output_dir) / "regret.svg";
    emit_plot(result.summary, svg);
    std::printf("wrote %s\n", svg.string().c_str());
  }
  return 0;
}

// --- verify -------------------------------------------------------------

struct VerifyFlags {
  std::string check = "corollary";
  std::size_t arms = 3;
  std::size_t horizon = 200;
  double gamma = 0.1;
  double delta = 0.05;
  std::size_t replications = 10000;
  std::string process = "spiky";
  std::string sampling = "exp";
  std::string estimator = "ix";
  std::string schedule = "fixed";
  std::string weights = "regret";
  std::optional<std::size_t> arm;
  std::string graph;
  bool grid = false;
  std::uint64_t seed = 0;
  std::size_t threads = 1;
  std::optional<std::string> out;
};

LossProcess parse_process(const std::string& s) {
  if (s == "zero") return LossProcess::Zero;
  if (s == "iid") return LossProcess::IidBernoulli;
  if (s == "uniform") return LossProcess::IidUniform;
  if (s == "spiky") return LossProcess::AdaptiveSpiky;
  throw ConfigError("--process must be zero, iid, uniform or spiky");
}

SamplingRule parse_sampling(const std::string& s) {
  if (s == "uniform") return SamplingRule::Uniform;
  if (s == "exp") return SamplingRule::ExponentialWeights;
  throw ConfigError("--sampling must be uniform or exp");
}

EstimatorKind parse_estimator(const std::string& s) {
  if (s == "ix") return EstimatorKind::Ix;
  if (s == "alt-a") return EstimatorKind::IxAltA;
  if (s == "alt-log") return EstimatorKind::IxAltLog;
  throw ConfigError("--estimator must be ix, alt-a or alt-log");
}

struct VerifyRow {
  std::string check;
  std::size_t arms;
  std::size_t horizon;
  double gamma;
  double delta;  // NaN when not applicable
  MonteCarloEstimate est;
};

VerifyRow run_check(const VerifyFlags& f, const std::string& check,
                    const ProcessSpec& process, EstimatorKind estimator,
                    double gamma, double delta) {
  const MonteCarloOptions mc{f.seed, f.threads};
  const std::string label = check + "/" + to_string(process.losses) + "/" +
                            to_string(process.sampling) + "/" +
                            to_string(estimator);
  if (check == "corollary") {
    return {label, process.arms, process.horizon, gamma, delta,
            verify_corollary1(process, gamma, delta, f.replications, estimator, mc)};
  }
  if (check == "lemma") {
    Schedule sched = f.schedule == "anytime"
                         ? Schedule::anytime(2.0 * gamma, gamma)
                         : Schedule::fixed(2.0 * gamma, gamma);
    WeightRule rule;
    if (f.weights == "regret") {
      rule = regret_proof_weights();
    } else if (f.weights == "full") {
      rule = full_weights();
    } else if (f.weights == "zero") {
      rule = zero_weights();
    } else if (f.weights == "single") {
      rule = single_arm_weights(f.arm.value_or(1) - 1);
    } else {
      throw ConfigError("--weights must be regret, full, zero or single");
    }
    return {label, process.arms, process.horizon, gamma, delta,
            verify_lemma1(rule, sched, process, delta, f.replications, estimator, mc)};
  }
  if (check == "supermartingale") {
    std::optional<Arm> arm;
    if (f.arm) {
      if (*f.arm < 1) throw ConfigError("--arm is 1-based");
      arm = *f.arm - 1;
    }
    return {label, process.arms, process.horizon, gamma, std::nan(""),
            verify_supermartingale(process, gamma, f.replications, estimator, arm, mc)};
  }
  throw ConfigError("--check must be corollary, lemma or supermartingale");
}

int cmd_verify(const VerifyFlags& f) {
  std::vector<VerifyRow> rows;
  std::shared_ptr<const FeedbackGraph> graph;
  if (!f.graph.empty()) {
    graph = std::make_shared<FeedbackGraph>(FeedbackGraph::load_edge_list(f.graph, f.arms));
  }
  if (f.grid) {
    // Corollary grid over K, T, gamma, delta for i.i.d. and adaptive losses.
    for (auto losses : {LossProcess::IidBernoulli, LossProcess::AdaptiveSpiky}) {
      for (std::size_t k : {2, 5, 10}) {
        for (std::size_t t : {100, 1000}) {
          for (double g : {0.05, 0.1, 0.3}) {
            ProcessSpec p{k, t, losses, SamplingRule::ExponentialWeights, nullptr};
            const auto dev = corollary1_deviations(p, g, f.replications,
                                                   parse_estimator(f.estimator),
                                                   {f.seed, f.threads});
            for (double d : {0.1, 0.01}) {
              rows.push_back({std::string("corollary/") + to_string(losses) + "/" +
                                  f.estimator,
                              k, t, g, d,
                              frequency_check(dev, corollary1_threshold(k, g, d), d)});
            }
          }
        }
      }
    }
  } else {
    ProcessSpec p{f.arms, f.horizon, parse_process(f.process),
                  parse_sampling(f.sampling), graph};
    rows.push_back(run_check(f, f.check, p, parse_estimator(f.estimator), f.gamma,
                             f.delta));
  }

  std::ostringstream csv;
  csv << "check,K,T,gamma,delta,replications,value,stderr,pass\n";
  bool all = true;
  for (const auto& r : rows) {
    csv << r.check << ',' << r.arms << ',' << r.horizon << ','
        << format_number(r.gamma) << ','
        << (std::isnan(r.delta) ? std::string() : format_number(r.delta)) << ','
        << r.est.replications << ',' << format_number(r.est.value) << ','
        << format_number(r.est.std_error) << ',' << (r.est.pass ? "true" : "false")
        << '\n';
    std::printf("%-4s %-48s K=%-3zu T=%-5zu gamma=%-5g value=%.5g (thr %.4g, se %.2g)\n",
                r.est.pass ? "PASS" : "FAIL", r.check.c_str(), r.arms, r.horizon,
                r.gamma, r.est.value, r.est.threshold, r.est.std_error);
    all = all && r.est.pass;
  }
  if (f.out) {
    std::filesystem::create_directories(*f.out);
    const auto path = std::filesystem::path(*f.out) / "verify.csv";
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << csv.str();
    std::printf("wrote %s\n", path.string().c_str());
  } else {
    std::fputs(csv.str().c_str(), stdout);
  }
  return all ? 0 : kExitVerify;
}

// --- bounds -------------------------------------------------------------

struct BoundFlags {
  std::size_t arms = 10;
  std::size_t horizon = 1000000;
  double delta = 0.05;
  std::optional<std::size_t> experts;
  std::optional<std::size_t> switches;
  std::optional<std::size_t> independence;
  std::string graph;
};

int cmd_bounds(const BoundFlags& f) {
  BoundSpec spec;
  spec.arms = f.arms;
  spec.horizon = f.horizon;
  spec.delta = f.delta;
  spec.experts = f.experts;
  spec.switches = f.switches;
  spec.independence = f.independence;
  if (!f.graph.empty()) {
    const auto g = FeedbackGraph::load_edge_list(f.graph, f.arms);
    const auto a = independence_number(g, IndependenceMode::Auto);
    spec.independence = a.value;
    std::printf("independence number: %zu%s\n", a.value,
                a.exact ? "" : " (greedy lower estimate)");
  }
  spec.validate();
  const double k = static_cast<double>(f.arms);
  const double t = static_cast<double>(f.horizon);
  std::printf("K=%zu T=%zu delta=%g\n", f.arms, f.horizon, f.delta);
  std::printf("exp3ix fixed    bound %.6g   eta=2gamma=%.6g\n", bound_thm1_fixed(spec),
              std::sqrt(2.0 * std::log(k) / (k * t)));
  std::printf("exp3ix anytime  bound %.6g   eta_t=2gamma_t=%.6g/sqrt(t)\n",
              bound_thm1_anytime(spec), std::sqrt(std::log(k) / k));
  if (spec.experts) {
    std::printf("exp4ix N=%-6zu bound %.6g   eta=2gamma=%.6g\n", *spec.experts,
                bound_thm2(spec),
                std::sqrt(2.0 * std::log(static_cast<double>(*spec.experts)) / (k * t)));
  }
  if (spec.switches) {
    const double s = static_cast<double>(*spec.switches);
    std::printf("exp3six S=%-5zu bound %.6g   eta=2gamma=%.6g alpha=%.6g\n",
                *spec.switches, bound_thm3(spec),
                std::sqrt(2.0 * (s + 1.0) * std::log(k) / (k * t)), s / (t - 1.0));
  }
  if (spec.independence) {
    const double a = static_cast<double>(*spec.independence);
    std::printf("graph a=%-7zu bound %.6g   eta=2gamma=%.6g\n", *spec.independence,
                bound_thm4(spec), std::sqrt(std::log(k) / (2.0 * a * t * std::log(k * t))));
  }
  return 0;
}

// --- best-seq -----------------------------------------------------------

int cmd_best_seq(const std::string& path, const std::vector<std::size_t>& switches,
                 bool witness) {
  const LossMatrix losses = load_loss_csv(path);
  std::vector<double> totals(losses.arms(), 0.0);
  for (std::size_t t = 0; t < losses.horizon(); ++t) {
    for (Arm i = 0; i < losses.arms(); ++i) totals[i] += losses.at(t, i);
  }
  const Arm best = argmin(totals);
  std::printf("T=%zu K=%zu\n", losses.horizon(), losses.arms());
  std::printf("best fixed arm %zu, loss %.10g\n", best + 1, totals[best]);
  for (std::size_t s : switches) {
    const auto v = best_switching_value(losses, s, witness);
    std::printf("at most %zu switches: loss %.10g", s, v.value);
    if (witness) {
      std::printf(", %zu used:", v.switches);
      std::size_t start = 0;
      for (std::size_t t = 1; t <= v.witness.size(); ++t) {
        if (t == v.witness.size() || v.witness[t] != v.witness[start]) {
          std::printf(" arm %zu [%zu-%zu]", v.witness[start] + 1, start + 1, t);
          start = t;
        }
      }
    }
    std::printf("\n");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial bandit simulations with implicit-exploration estimates"};
  app.require_subcommand(1);

  RunFlags sim_flags;
  std::string config_path;
  auto* simulate = app.add_subcommand("simulate", "Run an experiment config");
  simulate->add_option("config", config_path, "JSON experiment config")->required();
  add_run_flags(simulate, sim_flags);

  RunFlags sweep_flags;
  std::size_t sweep_horizon = 1000000;
  auto* sweep = app.add_subcommand(
      "sweep", "EXP3, EXP3.P and EXP3-IX over multipliers 0.01..100 on the shifting "
               "Bernoulli problem");
  sweep->add_option("--horizon", sweep_horizon, "Horizon T")->check(CLI::PositiveNumber);
  add_run_flags(sweep, sweep_flags);

  VerifyFlags vf;
  auto* verify = app.add_subcommand("verify", "Monte Carlo concentration checks");
  verify->add_option("--check", vf.check, "corollary, lemma or supermartingale");
  verify->add_option("--arms", vf.arms, "K");
  verify->add_option("--horizon", vf.horizon, "T");
  verify->add_option("--gamma", vf.gamma, "IX parameter");
  verify->add_option("--delta", vf.delta, "Confidence level");
  verify->add_option("--replications", vf.replications, "Monte Carlo replications");
  verify->add_option("--process", vf.process, "zero, iid, uniform or spiky");
  verify->add_option("--sampling", vf.sampling, "uniform or exp");
  verify->add_option("--estimator", vf.estimator, "ix, alt-a or alt-log");
  verify->add_option("--schedule", vf.schedule, "fixed or anytime (lemma check)");
  verify->add_option("--weights", vf.weights, "regret, full, zero or single (lemma check)");
  verify->add_option("--arm", vf.arm, "1-based arm for single-arm weights");
  verify->add_option("--graph", vf.graph, "Edge-list file for side observations");
  verify->add_flag("--grid", vf.grid, "Run the corollary check over the standard grid");
  verify->add_option("--seed", vf.seed, "Base seed");
  verify->add_option("--threads", vf.threads, "Worker threads")->check(CLI::PositiveNumber);
  verify->add_option("--out", vf.out, "Directory for verify.csv");

  BoundFlags bf;
  auto* bounds = app.add_subcommand("bounds", "Print high-probability regret bounds");
  bounds->add_option("--arms", bf.arms, "K");
  bounds->add_option("--horizon", bf.horizon, "T");
  bounds->add_option("--delta", bf.delta, "Confidence level");
  bounds->add_option("--experts", bf.experts, "Number of experts N");
  bounds->add_option("--switches", bf.switches, "Switch budget S");
  bounds->add_option("--independence", bf.independence, "Independence number");
  bounds->add_option("--graph", bf.graph, "Edge-list file; computes the independence number");

  std::string best_path;
  std::vector<std::size_t> best_switches;
  bool no_witness = false;
  auto* best = app.add_subcommand("best-seq", "Comparator values for a CSV loss matrix");
  best->add_option("losses", best_path, "CSV loss matrix (T rows, K columns)")->required();
  best->add_option("--switches", best_switches, "Switch budgets to evaluate")
      ->delimiter(',');
  best->add_flag("--no-witness", no_witness, "Only report values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*simulate) {
      ExperimentConfig cfg = load_config(config_path);
      apply_flags(cfg, sim_flags);
      return run_and_report(cfg, !sim_flags.no_plot);
    }
    if (*sweep) {
      ExperimentConfig cfg = sweep_config(sweep_horizon);
      cfg.output_dir = "sweep";
      apply_flags(cfg, sweep_flags);
      return run_and_report(cfg, !sweep_flags.no_plot);
    }
    if (*verify) return cmd_verify(vf);
    if (*bounds) return cmd_bounds(bf);
    if (*best) return cmd_best_seq(best_path, best_switches, !no_witness);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitRuntime;
  }
  return 0;
}
