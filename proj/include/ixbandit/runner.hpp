#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <istream>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ixbandit/comparators.hpp"
#include "ixbandit/core.hpp"
#include "ixbandit/environments.hpp"
#include "ixbandit/graphs.hpp"
#include "ixbandit/policies.hpp"

namespace ixbandit {

enum class PolicyVariant { Exp3, Exp3Ix, Exp3P, Exp4Ix, Exp3Six, GraphExp3Ix };

const char* to_string(PolicyVariant variant);
// Accepts the names produced by to_string.
PolicyVariant parse_variant(std::string_view name);

// Base parameters before the sweep multiplier is applied.
struct BaseParameters {
  double eta = 0.0;
  double gamma = 0.0;
  double beta = 0.0;         // EXP3.P only
  double alpha_share = 0.0;  // Fixed-Share only
};

struct DefaultInputs {
  double delta = 0.05;
  std::optional<std::size_t> switches;      // EXP3-SIX
  std::optional<std::size_t> experts;       // EXP4-IX
  std::optional<std::size_t> independence;  // graph EXP3-IX
};

// Tuned defaults.
//   exp3, exp3ix:  eta = sqrt(2 log K / (KT)), gamma = eta / 2 (0 for exp3)
//   exp3p:         eta as above, beta = eta, gamma = K eta
//   exp4ix:        eta = 2 gamma = sqrt(2 log N / (KT))
//   exp3six:       eta = 2 gamma = sqrt(2 (S+1) log K / (KT)), alpha = S/(T-1)
//   exp3ix-graph:  eta = 2 gamma = sqrt(log K / (2 a T log(KT)))
// For anytime schedules the horizon-free base sqrt(log K / K) is returned and
// the schedule divides by sqrt(t).
BaseParameters default_parameters(PolicyVariant variant, std::size_t arms,
                                  std::size_t horizon,
                                  const DefaultInputs& inputs = {},
                                  ScheduleKind schedule = ScheduleKind::Fixed);

enum class EnvironmentKind { ShiftBernoulli, ObliviousCsv };

struct EnvironmentSpec {
  EnvironmentKind kind = EnvironmentKind::ShiftBernoulli;
  std::size_t arms = 10;
  double gap = 0.1;
  std::string path;  // CSV loss matrix for ObliviousCsv
};

enum class AdviceKind { PointMasses, Random };

struct PolicySpec {
  std::string label;  // defaults to the variant name
  PolicyVariant variant = PolicyVariant::Exp3Ix;
  ScheduleKind schedule = ScheduleKind::Fixed;
  std::vector<double> multipliers{1.0};
  // Overrides for the tuned defaults.
  std::optional<double> eta;
  std::optional<double> gamma;
  std::optional<double> beta;
  std::optional<double> alpha;
  std::optional<std::size_t> switches;  // exp3six
  // exp4ix: point masses give N = K experts; random gives `experts` fixed
  // random advice rows, drawn once from the base seed.
  AdviceKind advice = AdviceKind::PointMasses;
  std::optional<std::size_t> experts;
  // exp3ix-graph: "empty", "complete" or an edge-list path.
  std::string graph = "empty";
};

struct ExperimentConfig {
  EnvironmentSpec environment;
  std::vector<PolicySpec> policies;
  std::size_t horizon = 1000;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  std::vector<std::size_t> checkpoints;  // empty means {T/2, T}
  std::size_t threads = 1;
  double delta = 0.05;
  std::string output_dir = "out";

  // Throws ConfigError naming the offending field.
  void validate() const;
  std::vector<std::size_t> resolved_checkpoints() const;
};

// Reads a JSON config. Errors carry "<source>:<line>:<col>: <field>: ...".
ExperimentConfig parse_config(std::string_view text,
                              const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

// The multiplier-sweep experiment on the shifting Bernoulli problem: EXP3,
// EXP3.P and EXP3-IX with fixed default tuning and multipliers
// 10^{-2}, 10^{-1.5}, ..., 10^{2}.
ExperimentConfig sweep_config(std::size_t horizon = 1000000,
                              std::size_t runs = 50, std::uint64_t seed = 0);
std::vector<double> sweep_multipliers();

struct RegretRow {
  std::string policy;
  double multiplier = 1.0;
  std::size_t checkpoint = 0;
  std::size_t run = 0;
  double regret = 0.0;
};

struct AggregateRow {
  std::string policy;
  double multiplier = 1.0;
  std::size_t checkpoint = 0;
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation; 0 for a single run
  std::size_t n = 0;
};

struct RunSummary {
  std::vector<RegretRow> raw;        // sorted by (policy, multiplier, checkpoint, run)
  std::vector<AggregateRow> aggregate;
  std::vector<RegretRow> pseudo;     // stochastic environments only

  // q-quantile (linear interpolation) of the per-run regrets of one cell.
  double percentile(std::string_view policy, double multiplier,
                    std::size_t checkpoint, double q) const;
  const AggregateRow* find(std::string_view policy, double multiplier,
                           std::size_t checkpoint) const;
};

// Groups rows by (policy, multiplier, checkpoint) in the order they first
// appear and computes mean, sample std and count.
std::vector<AggregateRow> aggregate_rows(const std::vector<RegretRow>& rows);

struct RunOptions {
  bool keep_records = false;  // retain full per-run traces
};

struct ExperimentResult {
  RunSummary summary;
  // One per (policy, multiplier, run) when keep_records is set, in the
  // (policy, multiplier, run) order of the summary.
  std::vector<RunRecord> records;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                RunOptions options = {});

// Builds the policy object for one (spec, multiplier) pair.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, double multiplier,
                                    std::size_t arms, std::size_t horizon,
                                    double delta, std::uint64_t seed);

// --- Output ---------------------------------------------------------------

void write_raw_csv(const std::vector<RegretRow>& rows, std::ostream& out);
void write_aggregate_csv(const std::vector<AggregateRow>& rows,
                         std::ostream& out);
std::vector<RegretRow> parse_raw_csv(std::istream& in,
                                     const std::string& source = "csv");
std::vector<AggregateRow> parse_aggregate_csv(std::istream& in,
                                              const std::string& source = "csv");

// Writes regret_raw.csv and regret_summary.csv into `dir`, plus
// pseudo_regret_raw.csv when the summary carries pseudo-regret rows.
// Returns the files written.
std::vector<std::filesystem::path> emit_csv(const RunSummary& summary,
                                            const std::filesystem::path& dir);

// Mean regret against multiplier (log axis) with +-1 std bars, one series per
// policy and one panel per checkpoint.
std::string render_plot(const RunSummary& summary);
void emit_plot(const RunSummary& summary, const std::filesystem::path& path);

// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

}  // namespace ixbandit
