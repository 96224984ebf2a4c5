#include "ixbandit/runner.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ixbandit/parallel.hpp"

namespace ixbandit {

const char* to_string(PolicyVariant variant) {
  switch (variant) {
    case PolicyVariant::Exp3: return "exp3";
    case PolicyVariant::Exp3Ix: return "exp3ix";
    case PolicyVariant::Exp3P: return "exp3p";
    case PolicyVariant::Exp4Ix: return "exp4ix";
    case PolicyVariant::Exp3Six: return "exp3six";
    case PolicyVariant::GraphExp3Ix: return "exp3ix-graph";
  }
  return "?";
}

PolicyVariant parse_variant(std::string_view name) {
  for (auto v : {PolicyVariant::Exp3, PolicyVariant::Exp3Ix,
                 PolicyVariant::Exp3P, PolicyVariant::Exp4Ix,
                 PolicyVariant::Exp3Six, PolicyVariant::GraphExp3Ix}) {
    if (name == to_string(v)) return v;
  }
  throw ConfigError("unknown policy variant '" + std::string(name) +
                    "' (expected exp3, exp3ix, exp3p, exp4ix, exp3six or "
                    "exp3ix-graph)");
}

BaseParameters default_parameters(PolicyVariant variant, std::size_t arms,
                                  std::size_t horizon,
                                  const DefaultInputs& inputs,
                                  ScheduleKind schedule) {
  if (arms < 2) throw ConfigError("default parameters need K >= 2");
  if (horizon < 1) throw ConfigError("default parameters need T >= 1");
  const double k = static_cast<double>(arms);
  const double t = static_cast<double>(horizon);
  const double log_k = std::log(k);
  const bool anytime = schedule == ScheduleKind::Anytime;
  BaseParameters out;
  switch (variant) {
    case PolicyVariant::Exp3:
    case PolicyVariant::Exp3Ix:
      out.eta = anytime ? std::sqrt(log_k / k) : std::sqrt(2.0 * log_k / (k * t));
      out.gamma = variant == PolicyVariant::Exp3Ix ? out.eta / 2.0 : 0.0;
      break;
    case PolicyVariant::Exp3P:
      if (anytime) throw ConfigError("exp3p has no anytime schedule");
      out.eta = std::sqrt(2.0 * log_k / (k * t));
      out.beta = out.eta;
      out.gamma = k * out.eta;
      break;
    case PolicyVariant::Exp4Ix: {
      if (!inputs.experts) throw ConfigError("exp4ix defaults need the expert count N");
      if (*inputs.experts < 2) throw ConfigError("exp4ix defaults need N >= 2");
      if (anytime) throw ConfigError("exp4ix supports only the fixed schedule");
      const double log_n = std::log(static_cast<double>(*inputs.experts));
      out.eta = std::sqrt(2.0 * log_n / (k * t));
      out.gamma = out.eta / 2.0;
      break;
    }
    case PolicyVariant::Exp3Six: {
      if (!inputs.switches) throw ConfigError("exp3six defaults need the switch count S");
      if (*inputs.switches < 1) throw ConfigError("exp3six defaults need S >= 1");
      if (horizon < 2) throw ConfigError("exp3six defaults need T >= 2");
      if (anytime) throw ConfigError("exp3six supports only the fixed schedule");
      const double s = static_cast<double>(*inputs.switches);
      out.eta = std::sqrt(2.0 * (s + 1.0) * log_k / (k * t));
      out.gamma = out.eta / 2.0;
      out.alpha_share = s / (t - 1.0);
      if (out.alpha_share > 1.0) throw ConfigError("exp3six needs S <= T - 1");
      break;
    }
    case PolicyVariant::GraphExp3Ix: {
      if (!inputs.independence) {
        throw ConfigError("graph defaults need the independence number");
      }
      if (*inputs.independence < 1) {
        throw ConfigError("independence number must be positive");
      }
      if (anytime) throw ConfigError("exp3ix-graph supports only the fixed schedule");
      const double a = static_cast<double>(*inputs.independence);
      out.eta = std::sqrt(log_k / (2.0 * a * t * std::log(k * t)));
      out.gamma = out.eta / 2.0;
      break;
    }
  }
  return out;
}

// --- Config -----------------------------------------------------------------

void ExperimentConfig::validate() const {
  if (horizon < 1) throw ConfigError("horizon: must be at least 1");
  if (runs < 1) throw ConfigError("runs: must be at least 1");
  if (threads < 1) throw ConfigError("threads: must be at least 1");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta: must lie in (0,1)");
  if (policies.empty()) throw ConfigError("policies: at least one policy is required");
  if (environment.kind == EnvironmentKind::ShiftBernoulli) {
    ShiftBernoulliConfig{environment.arms, horizon, environment.gap}.validate();
  } else if (environment.path.empty()) {
    throw ConfigError("environment.path: required for oblivious_csv");
  }
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < policies.size(); ++i) {
    const auto& p = policies[i];
    const std::string where = "policies[" + std::to_string(i) + "]";
    if (p.multipliers.empty()) {
      throw ConfigError(where + ".multipliers: at least one multiplier is required");
    }
    for (double m : p.multipliers) {
      if (!(m > 0.0) || !std::isfinite(m)) {
        throw ConfigError(where + ".multipliers: multipliers must be positive");
      }
      if (std::count(p.multipliers.begin(), p.multipliers.end(), m) > 1) {
        throw ConfigError(where + ".multipliers: duplicate multiplier");
      }
    }
    const std::string label = p.label.empty() ? to_string(p.variant) : p.label;
    if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
      throw ConfigError(where + ".label: duplicate policy label '" + label + "'");
    }
    labels.push_back(label);
  }
  std::size_t prev = 0;
  for (std::size_t c : checkpoints) {
    if (c < 1 || c > horizon) {
      throw ConfigError("checkpoints: " + std::to_string(c) +
                        " is outside 1..T = " + std::to_string(horizon));
    }
    if (c <= prev) throw ConfigError("checkpoints: must be strictly increasing");
    prev = c;
  }
}

std::vector<std::size_t> ExperimentConfig::resolved_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  if (horizon / 2 >= 1 && horizon / 2 < horizon) return {horizon / 2, horizon};
  return {horizon};
}

namespace {

using nlohmann::json;

struct TextPos {
  std::size_t line = 1;
  std::size_t col = 1;
};

TextPos position_of(std::string_view text, std::size_t offset) {
  TextPos pos;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++pos.line;
      pos.col = 1;
    } else {
      ++pos.col;
    }
  }
  return pos;
}

// Maps field paths such as "policies[1].multipliers[0]" to the position of
// their value in already validated JSON text.
class PathIndex {
 public:
  explicit PathIndex(std::string_view text) : text_(text) {
    skip_ws();
    value("");
  }

  std::optional<std::size_t> offset(const std::string& path) const {
    auto it = offsets_.find(path);
    if (it == offsets_.end()) return std::nullopt;
    return it->second;
  }

 private:
  void skip_ws() {
    while (i_ < text_.size() &&
           (text_[i_] == ' ' || text_[i_] == '\t' || text_[i_] == '\n' ||
            text_[i_] == '\r')) {
      ++i_;
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < text_.size() && text_[i_] != '"') {
      if (text_[i_] == '\\') ++i_;
      if (i_ < text_.size()) out += text_[i_++];
    }
    ++i_;  // closing quote
    return out;
  }

  void value(const std::string& path) {
    offsets_.emplace(path, i_);
    if (i_ >= text_.size()) return;
    const char c = text_[i_];
    if (c == '{') {
      ++i_;
      skip_ws();
      while (i_ < text_.size() && text_[i_] != '}') {
        const std::string key = string_token();
        skip_ws();
        ++i_;  // ':'
        skip_ws();
        value(path.empty() ? key : path + "." + key);
        skip_ws();
        if (i_ < text_.size() && text_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      skip_ws();
      std::size_t index = 0;
      while (i_ < text_.size() && text_[i_] != ']') {
        value(path + "[" + std::to_string(index++) + "]");
        skip_ws();
        if (i_ < text_.size() && text_[i_] == ',') ++i_;
        skip_ws();
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < text_.size() && text_[i_] != ',' && text_[i_] != '}' &&
             text_[i_] != ']' && text_[i_] != ' ' && text_[i_] != '\n' &&
             text_[i_] != '\r' && text_[i_] != '\t') {
        ++i_;
      }
    }
  }

  std::string_view text_;
  std::size_t i_ = 0;
  std::map<std::string, std::size_t> offsets_;
};

class ConfigReader {
 public:
  ConfigReader(std::string_view text, std::string source)
      : text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& msg) const {
    // Fall back to the nearest enclosing field that has a position.
    std::string probe = path;
    std::optional<std::size_t> off = index_->offset(probe);
    while (!off && !probe.empty()) {
      const auto cut = probe.find_last_of(".[");
      probe = cut == std::string::npos ? "" : probe.substr(0, cut);
      off = index_->offset(probe);
    }
    const TextPos pos = position_of(text_, off.value_or(0));
    throw ConfigError(source_ + ":" + std::to_string(pos.line) + ":" +
                      std::to_string(pos.col) + ": " +
                      (path.empty() ? "config" : path) + ": " + msg);
  }

  void only_keys(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (std::find(allowed.begin(), allowed.end(), it.key()) == allowed.end()) {
        fail(join(path, it.key()), "unknown field");
      }
    }
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }

  const json& object(const json& v, const std::string& path) const {
    if (!v.is_object()) fail(path, "expected an object");
    return v;
  }

  std::size_t count(const json& v, const std::string& path) const {
    if (!v.is_number_integer() || (v.is_number_integer() && v.get<long long>() < 0 &&
                                   !v.is_number_unsigned())) {
      fail(path, "expected a nonnegative integer");
    }
    return v.get<std::size_t>();
  }

  std::uint64_t u64(const json& v, const std::string& path) const {
    if (!v.is_number_unsigned()) fail(path, "expected a nonnegative integer");
    return v.get<std::uint64_t>();
  }

  double real(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  }

  std::string str(const json& v, const std::string& path) const {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

  template <class Fn>
  auto guarded(const std::string& path, Fn&& fn) const -> decltype(fn()) {
    try {
      return fn();
    } catch (const ConfigError& e) {
      fail(path, e.what());
    }
  }

  EnvironmentSpec environment(const json& v) const {
    const std::string path = "environment";
    object(v, path);
    only_keys(v, path, {"kind", "arms", "gap", "path"});
    EnvironmentSpec env;
    if (!v.contains("kind")) fail(path, "missing field 'kind'");
    const std::string kind = str(v["kind"], path + ".kind");
    if (kind == "shift_bernoulli") {
      env.kind = EnvironmentKind::ShiftBernoulli;
    } else if (kind == "oblivious_csv") {
      env.kind = EnvironmentKind::ObliviousCsv;
    } else {
      fail(path + ".kind", "expected shift_bernoulli or oblivious_csv");
    }
    if (v.contains("arms")) env.arms = count(v["arms"], path + ".arms");
    if (v.contains("gap")) env.gap = real(v["gap"], path + ".gap");
    if (v.contains("path")) env.path = str(v["path"], path + ".path");
    if (env.kind == EnvironmentKind::ShiftBernoulli) {
      if (env.arms != 10) fail(path + ".arms", "the shifting problem has 10 arms");
      if (!(env.gap > 0.0 && env.gap <= 0.125)) {
        fail(path + ".gap", "gap must lie in (0, 1/8]");
      }
    } else if (env.path.empty()) {
      fail(path, "oblivious_csv needs 'path'");
    }
    return env;
  }

  PolicySpec policy(const json& v, const std::string& path) const {
    object(v, path);
    only_keys(v, path,
              {"variant", "label", "schedule", "multipliers", "eta", "gamma",
               "beta", "alpha", "switches", "advice", "experts", "graph"});
    PolicySpec p;
    if (!v.contains("variant")) fail(path, "missing field 'variant'");
    p.variant = guarded(path + ".variant",
                        [&] { return parse_variant(str(v["variant"], path + ".variant")); });
    if (v.contains("label")) p.label = str(v["label"], path + ".label");
    if (v.contains("schedule")) {
      const std::string s = str(v["schedule"], path + ".schedule");
      if (s == "fixed") {
        p.schedule = ScheduleKind::Fixed;
      } else if (s == "anytime") {
        p.schedule = ScheduleKind::Anytime;
      } else {
        fail(path + ".schedule", "expected fixed or anytime");
      }
    }
    if (v.contains("multipliers")) {
      const auto& arr = v["multipliers"];
      if (!arr.is_array()) fail(path + ".multipliers", "expected an array");
      if (arr.empty()) fail(path + ".multipliers", "at least one multiplier is required");
      p.multipliers.clear();
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = path + ".multipliers[" + std::to_string(i) + "]";
        const double m = real(arr[i], at);
        if (!(m > 0.0)) fail(at, "multipliers must be positive");
        p.multipliers.push_back(m);
      }
    }
    auto positive = [&](const char* key, std::optional<double>& slot) {
      if (!v.contains(key)) return;
      const std::string at = path + "." + key;
      const double x = real(v[key], at);
      if (!(x >= 0.0)) fail(at, "must be nonnegative");
      slot = x;
    };
    positive("eta", p.eta);
    positive("gamma", p.gamma);
    positive("beta", p.beta);
    positive("alpha", p.alpha);
    if (p.alpha && *p.alpha > 1.0) fail(path + ".alpha", "must lie in [0,1]");
    if (v.contains("switches")) p.switches = count(v["switches"], path + ".switches");
    if (v.contains("experts")) p.experts = count(v["experts"], path + ".experts");
    if (v.contains("advice")) {
      const std::string a = str(v["advice"], path + ".advice");
      if (a == "point_masses") {
        p.advice = AdviceKind::PointMasses;
      } else if (a == "random") {
        p.advice = AdviceKind::Random;
      } else {
        fail(path + ".advice", "expected point_masses or random");
      }
    }
    if (v.contains("graph")) p.graph = str(v["graph"], path + ".graph");
    if (p.variant == PolicyVariant::Exp3Six && !p.switches && !p.alpha) {
      fail(path, "exp3six needs 'switches' or 'alpha'");
    }
    if (p.variant == PolicyVariant::Exp4Ix && p.advice == AdviceKind::Random &&
        (!p.experts || *p.experts < 2)) {
      fail(path, "random advice needs 'experts' >= 2");
    }
    return p;
  }

  ExperimentConfig config() {
    json root;
    try {
      root = json::parse(text_.begin(), text_.end());
    } catch (const json::parse_error& e) {
      const TextPos pos =
          position_of(text_, e.byte > 0 ? static_cast<std::size_t>(e.byte - 1) : 0);
      std::string what = e.what();
      const auto cut = what.find("parse error");
      throw ConfigError(source_ + ":" + std::to_string(pos.line) + ":" +
                        std::to_string(pos.col) + ": " +
                        (cut == std::string::npos ? what : what.substr(cut)));
    }
    index_.emplace(text_);
    object(root, "");
    only_keys(root, "",
              {"environment", "policies", "horizon", "runs", "seed",
               "checkpoints", "threads", "delta", "output"});
    ExperimentConfig cfg;
    if (!root.contains("environment")) fail("", "missing field 'environment'");
    if (!root.contains("policies")) fail("", "missing field 'policies'");
    if (!root.contains("horizon")) fail("", "missing field 'horizon'");
    cfg.horizon = count(root["horizon"], "horizon");
    if (cfg.horizon < 1) fail("horizon", "must be at least 1");
    cfg.environment = environment(root["environment"]);
    const auto& pols = root["policies"];
    if (!pols.is_array()) fail("policies", "expected an array");
    if (pols.empty()) fail("policies", "at least one policy is required");
    for (std::size_t i = 0; i < pols.size(); ++i) {
      cfg.policies.push_back(policy(pols[i], "policies[" + std::to_string(i) + "]"));
    }
    if (root.contains("runs")) {
      cfg.runs = count(root["runs"], "runs");
      if (cfg.runs < 1) fail("runs", "must be at least 1");
    }
    if (root.contains("seed")) cfg.seed = u64(root["seed"], "seed");
    if (root.contains("threads")) {
      cfg.threads = count(root["threads"], "threads");
      if (cfg.threads < 1) fail("threads", "must be at least 1");
    }
    if (root.contains("delta")) {
      cfg.delta = real(root["delta"], "delta");
      if (!(cfg.delta > 0.0 && cfg.delta < 1.0)) fail("delta", "must lie in (0,1)");
    }
    if (root.contains("output")) cfg.output_dir = str(root["output"], "output");
    if (root.contains("checkpoints")) {
      const auto& arr = root["checkpoints"];
      if (!arr.is_array()) fail("checkpoints", "expected an array");
      std::size_t prev = 0;
      for (std::size_t i = 0; i < arr.size(); ++i) {
        const std::string at = "checkpoints[" + std::to_string(i) + "]";
        const std::size_t c = count(arr[i], at);
        if (c < 1 || c > cfg.horizon) fail(at, "checkpoint outside 1..horizon");
        if (c <= prev) fail(at, "checkpoints must be strictly increasing");
        prev = c;
        cfg.checkpoints.push_back(c);
      }
    }
    guarded("", [&] {
      cfg.validate();
      return 0;
    });
    return cfg;
  }

 private:
  std::string_view text_;
  std::string source_;
  std::optional<PathIndex> index_;  // built once the text parses
};

}  // namespace

ExperimentConfig parse_config(std::string_view text, const std::string& source) {
  return ConfigReader(text, source).config();
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ExperimentConfig cfg = parse_config(buf.str(), path);
  // Relative data paths are taken relative to the config file.
  const auto base = std::filesystem::path(path).parent_path();
  auto resolve = [&](std::string& p) {
    if (!p.empty() && std::filesystem::path(p).is_relative()) {
      p = (base / p).string();
    }
  };
  if (cfg.environment.kind == EnvironmentKind::ObliviousCsv) {
    resolve(cfg.environment.path);
  }
  for (auto& pol : cfg.policies) {
    if (pol.graph != "empty" && pol.graph != "complete") resolve(pol.graph);
  }
  return cfg;
}

std::vector<double> sweep_multipliers() {
  std::vector<double> out;
  for (int e = -4; e <= 4; ++e) out.push_back(std::pow(10.0, e / 2.0));
  return out;
}

ExperimentConfig sweep_config(std::size_t horizon, std::size_t runs,
                              std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.environment = EnvironmentSpec{EnvironmentKind::ShiftBernoulli, 10, 0.1, ""};
  cfg.horizon = horizon;
  cfg.runs = runs;
  cfg.seed = seed;
  for (auto v : {PolicyVariant::Exp3, PolicyVariant::Exp3P, PolicyVariant::Exp3Ix}) {
    PolicySpec p;
    p.variant = v;
    p.multipliers = sweep_multipliers();
    cfg.policies.push_back(p);
  }
  return cfg;
}

// --- Execution ------------------------------------------------------------

namespace {

std::shared_ptr<const FeedbackGraph> graph_for(const PolicySpec& spec,
                                               std::size_t arms) {
  if (spec.graph == "empty") {
    return std::make_shared<FeedbackGraph>(FeedbackGraph::empty(arms));
  }
  if (spec.graph == "complete") {
    return std::make_shared<FeedbackGraph>(FeedbackGraph::complete(arms));
  }
  return std::make_shared<FeedbackGraph>(
      FeedbackGraph::load_edge_list(spec.graph, arms));
}

ExpertAdvice random_advice(std::size_t experts, std::size_t arms,
                           std::uint64_t seed) {
  // Dirichlet(1,...,1) rows from normalised exponential draws.
  Rng rng = Rng(seed, 0).derive(0xad71ce);
  std::vector<double> rows(experts * arms);
  for (std::size_t n = 0; n < experts; ++n) {
    double total = 0.0;
    for (Arm i = 0; i < arms; ++i) {
      const double u = 1.0 - rng.uniform();  // (0, 1]
      rows[n * arms + i] = -std::log(u);
      total += rows[n * arms + i];
    }
    for (Arm i = 0; i < arms; ++i) rows[n * arms + i] /= total;
  }
  return ExpertAdvice(experts, arms, std::move(rows));
}

}  // namespace

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, double multiplier,
                                    std::size_t arms, std::size_t horizon,
                                    double delta, std::uint64_t seed) {
  if (!(multiplier > 0.0)) throw ConfigError("multiplier must be positive");
  DefaultInputs inputs;
  inputs.delta = delta;
  inputs.switches = spec.switches;

  std::shared_ptr<const FeedbackGraph> graph;
  std::optional<ExpertAdvice> advice;
  if (spec.variant == PolicyVariant::GraphExp3Ix) {
    graph = graph_for(spec, arms);
    inputs.independence = independence_number(*graph, IndependenceMode::Auto).value;
  }
  if (spec.variant == PolicyVariant::Exp4Ix) {
    advice = spec.advice == AdviceKind::PointMasses
                 ? ExpertAdvice::point_masses(arms)
                 : random_advice(spec.experts.value_or(0), arms, seed);
    inputs.experts = advice->experts();
  }
  if (spec.variant == PolicyVariant::Exp3Six && !spec.switches) {
    if (!spec.alpha) throw ConfigError("exp3six needs 'switches' or 'alpha'");
    inputs.switches = 1;  // only alpha was given; eta falls back to S = 1
  }

  BaseParameters base =
      default_parameters(spec.variant, arms, horizon, inputs, spec.schedule);
  if (spec.eta) base.eta = *spec.eta;
  if (spec.gamma) base.gamma = *spec.gamma;
  if (spec.beta) base.beta = *spec.beta;
  if (spec.alpha) base.alpha_share = *spec.alpha;

  const double eta = base.eta * multiplier;
  const double gamma = base.gamma * multiplier;
  const Schedule schedule = spec.schedule == ScheduleKind::Fixed
                                ? Schedule::fixed(base.eta, base.gamma, multiplier)
                                : Schedule::anytime(base.eta, base.gamma, multiplier);
  switch (spec.variant) {
    case PolicyVariant::Exp3:
      return std::make_unique<Exp3Policy>(arms, schedule);
    case PolicyVariant::Exp3Ix:
      return std::make_unique<Exp3IxPolicy>(arms, schedule);
    case PolicyVariant::Exp3P:
      // Scaling gamma = K eta past 1 would leave the simplex; cap it.
      return std::make_unique<Exp3PPolicy>(
          arms, Exp3PParams{eta, std::min(1.0, gamma), base.beta * multiplier});
    case PolicyVariant::Exp4Ix: {
      ExpertAdvice fixed = *advice;
      return std::make_unique<Exp4IxPolicy>(
          arms, fixed.experts(), schedule,
          [fixed](std::size_t) { return fixed; });
    }
    case PolicyVariant::Exp3Six:
      return std::make_unique<Exp3SixPolicy>(arms, schedule, base.alpha_share);
    case PolicyVariant::GraphExp3Ix:
      return std::make_unique<GraphExp3IxPolicy>(graph, schedule);
  }
  throw ConfigError("unknown policy variant");
}

namespace {

struct JobResult {
  std::vector<double> regret;  // per checkpoint
  std::vector<double> pseudo;  // per checkpoint, stochastic environments
  RunRecord record;
};

double sample_std(const std::vector<double>& xs, double mean) {
  if (xs.size() < 2) return 0.0;
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

}  // namespace

std::vector<AggregateRow> aggregate_rows(const std::vector<RegretRow>& rows) {
  std::vector<AggregateRow> out;
  std::vector<std::vector<double>> values;
  for (const auto& r : rows) {
    std::size_t g = 0;
    for (; g < out.size(); ++g) {
      if (out[g].policy == r.policy && out[g].multiplier == r.multiplier &&
          out[g].checkpoint == r.checkpoint) {
        break;
      }
    }
    if (g == out.size()) {
      out.push_back(AggregateRow{r.policy, r.multiplier, r.checkpoint, 0.0, 0.0, 0});
      values.emplace_back();
    }
    values[g].push_back(r.regret);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    double sum = 0.0;
    for (double x : values[g]) sum += x;
    out[g].n = values[g].size();
    out[g].mean = sum / static_cast<double>(out[g].n);
    out[g].std = sample_std(values[g], out[g].mean);
  }
  return out;
}

const AggregateRow* RunSummary::find(std::string_view policy, double multiplier,
                                     std::size_t checkpoint) const {
  for (const auto& a : aggregate) {
    if (a.policy == policy && a.multiplier == multiplier &&
        a.checkpoint == checkpoint) {
      return &a;
    }
  }
  return nullptr;
}

double RunSummary::percentile(std::string_view policy, double multiplier,
                              std::size_t checkpoint, double q) const {
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile must lie in [0,1]");
  std::vector<double> xs;
  for (const auto& r : raw) {
    if (r.policy == policy && r.multiplier == multiplier &&
        r.checkpoint == checkpoint) {
      xs.push_back(r.regret);
    }
  }
  if (xs.empty()) throw ConfigError("no runs recorded for that cell");
  std::sort(xs.begin(), xs.end());
  const double pos = q * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                RunOptions options) {
  config.validate();
  const std::size_t horizon = config.horizon;
  const auto checkpoints = config.resolved_checkpoints();

  std::shared_ptr<const LossMatrix> matrix;
  std::size_t arms = config.environment.arms;
  ShiftBernoulliConfig shift{config.environment.arms, horizon,
                             config.environment.gap};
  const bool stochastic =
      config.environment.kind == EnvironmentKind::ShiftBernoulli;
  if (!stochastic) {
    matrix = std::make_shared<LossMatrix>(load_loss_csv(config.environment.path));
    if (matrix->horizon() < horizon) {
      throw ConfigError("environment.path: loss matrix has " +
                        std::to_string(matrix->horizon()) +
                        " rows, fewer than the horizon " + std::to_string(horizon));
    }
    arms = matrix->arms();
  }

  struct Job {
    std::size_t policy;
    std::size_t mult;
    std::size_t run;
  };
  std::vector<Job> jobs;
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    for (std::size_t m = 0; m < config.policies[p].multipliers.size(); ++m) {
      for (std::size_t r = 0; r < config.runs; ++r) jobs.push_back({p, m, r});
    }
  }
  // Surface parameter errors before spending time on runs.
  for (std::size_t p = 0; p < config.policies.size(); ++p) {
    try {
      make_policy(config.policies[p], config.policies[p].multipliers[0], arms,
                  horizon, config.delta, config.seed);
    } catch (const ConfigError& e) {
      throw ConfigError("policies[" + std::to_string(p) + "]: " + e.what());
    }
  }

  std::vector<JobResult> results(jobs.size());
  parallel_for(jobs.size(), config.threads, [&](std::size_t j) {
    const Job& job = jobs[j];
    const PolicySpec& spec = config.policies[job.policy];
    auto policy = make_policy(spec, spec.multipliers[job.mult], arms, horizon,
                              config.delta, config.seed);
    // Common random numbers: the environment and the learner draw from
    // streams keyed on the run index only.
    const Rng env_stream(config.seed, 2 * job.run);
    Rng learner(config.seed, 2 * job.run + 1);

    JobResult& out = results[j];
    std::vector<double> arm_loss(arms, 0.0);
    std::vector<double> arm_mean(arms, 0.0);
    double learner_loss = 0.0;
    double learner_mean = 0.0;
    if (options.keep_records) {
      out.record.arms.reserve(horizon);
      out.record.incurred.reserve(horizon);
      out.record.losses = LossMatrix(horizon, arms);
    }
    std::size_t next_cp = 0;
    std::vector<double> drawn;
    std::vector<double> means;
    for (std::size_t t = 1; t <= horizon; ++t) {
      std::span<const double> losses;
      if (stochastic) {
        drawn = shift_bernoulli_losses(shift, t, env_stream);
        losses = drawn;
        means = shift.means(t);
        for (Arm i = 0; i < arms; ++i) arm_mean[i] += means[i];
      } else {
        losses = matrix->row(t - 1);
      }
      const StepResult step = policy->step(learner, losses);
      learner_loss += step.loss;
      if (stochastic) learner_mean += means[step.arm];
      for (Arm i = 0; i < arms; ++i) arm_loss[i] += losses[i];
      if (options.keep_records) {
        out.record.arms.push_back(step.arm);
        out.record.incurred.push_back(step.loss);
        for (Arm i = 0; i < arms; ++i) out.record.losses->set(t - 1, i, losses[i]);
      }
      if (next_cp < checkpoints.size() && t == checkpoints[next_cp]) {
        out.regret.push_back(learner_loss - arm_loss[argmin(arm_loss)]);
        if (stochastic) {
          out.pseudo.push_back(learner_mean - arm_mean[argmin(arm_mean)]);
        }
        ++next_cp;
      }
    }
  });

  ExperimentResult result;
  for (std::size_t j = 0; j < jobs.size(); ++j) {
    const Job& job = jobs[j];
    const PolicySpec& spec = config.policies[job.policy];
    const std::string label = spec.label.empty() ? to_string(spec.variant) : spec.label;
    const double mult = spec.multipliers[job.mult];
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      result.summary.raw.push_back(
          RegretRow{label, mult, checkpoints[c], job.run, results[j].regret[c]});
      if (stochastic) {
        result.summary.pseudo.push_back(
            RegretRow{label, mult, checkpoints[c], job.run, results[j].pseudo[c]});
      }
    }
    if (options.keep_records) result.records.push_back(std::move(results[j].record));
  }
  // Aggregate in (policy, multiplier, checkpoint) order. Jobs are laid out
  // as (policy, multiplier, run), so each cell's runs are contiguous.
  std::vector<RegretRow> ordered;
  ordered.reserve(result.summary.raw.size());
  const std::size_t n_cp = checkpoints.size();
  for (std::size_t first = 0; first < jobs.size(); first += config.runs) {
    for (std::size_t c = 0; c < n_cp; ++c) {
      for (std::size_t r = 0; r < config.runs; ++r) {
        ordered.push_back(result.summary.raw[(first + r) * n_cp + c]);
      }
    }
  }
  result.summary.aggregate = aggregate_rows(ordered);
  return result;
}

}  // namespace ixbandit
