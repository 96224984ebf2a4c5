#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "ixbandit/runner.hpp"
#include "support.hpp"

using namespace ixbandit;
namespace fs = std::filesystem;

namespace {

std::string error_of(std::string_view text) {
  try {
    parse_config(text, "cfg.json");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

bool contains(const std::string& s, std::string_view part) {
  return s.find(part) != std::string::npos;
}

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.horizon = 200;
  cfg.runs = 3;
  cfg.seed = 11;
  cfg.checkpoints = {50, 200};
  PolicySpec a;
  a.variant = PolicyVariant::Exp3Ix;
  a.multipliers = {0.5, 2.0};
  PolicySpec b;
  b.variant = PolicyVariant::Exp3;
  cfg.policies = {a, b};
  return cfg;
}

fs::path scratch(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("ixbandit_test_runner_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("default parameters") {
  const double k = 10, t = 1e4;
  auto p = default_parameters(PolicyVariant::Exp3Ix, 10, 10000);
  CHECK(p.eta == doctest::Approx(std::sqrt(2 * std::log(k) / (k * t))));
  CHECK(p.gamma == doctest::Approx(p.eta / 2));

  p = default_parameters(PolicyVariant::Exp3, 10, 10000);
  CHECK(p.gamma == 0.0);

  p = default_parameters(PolicyVariant::Exp3P, 10, 10000);
  CHECK(p.beta == doctest::Approx(p.eta));
  CHECK(p.gamma == doctest::Approx(10 * p.eta));

  DefaultInputs in;
  in.experts = 50;
  p = default_parameters(PolicyVariant::Exp4Ix, 10, 10000, in);
  CHECK(p.eta == doctest::Approx(std::sqrt(2 * std::log(50.0) / (k * t))));
  CHECK(p.gamma == doctest::Approx(p.eta / 2));

  in = {};
  in.switches = 4;
  p = default_parameters(PolicyVariant::Exp3Six, 10, 10000, in);
  CHECK(p.eta == doctest::Approx(std::sqrt(2 * 5 * std::log(k) / (k * t))));
  CHECK(p.alpha_share == doctest::Approx(4.0 / 9999.0));

  in = {};
  in.independence = 3;
  p = default_parameters(PolicyVariant::GraphExp3Ix, 10, 10000, in);
  CHECK(p.eta == doctest::Approx(std::sqrt(std::log(k) / (2 * 3 * t * std::log(k * t)))));

  p = default_parameters(PolicyVariant::Exp3Ix, 10, 10000, {}, ScheduleKind::Anytime);
  CHECK(p.eta == doctest::Approx(std::sqrt(std::log(k) / k)));

  CHECK_THROWS_AS(default_parameters(PolicyVariant::Exp4Ix, 10, 100), ConfigError);
  CHECK_THROWS_AS(default_parameters(PolicyVariant::Exp3Six, 10, 100), ConfigError);
  CHECK_THROWS_AS(default_parameters(PolicyVariant::GraphExp3Ix, 10, 100), ConfigError);
  CHECK_THROWS_AS(default_parameters(PolicyVariant::Exp3Ix, 1, 100), ConfigError);
  CHECK_THROWS_AS(default_parameters(PolicyVariant::Exp3P, 10, 100, {},
                                     ScheduleKind::Anytime),
                  ConfigError);
}

TEST_CASE("variant names round-trip") {
  for (auto v : {PolicyVariant::Exp3, PolicyVariant::Exp3Ix, PolicyVariant::Exp3P,
                 PolicyVariant::Exp4Ix, PolicyVariant::Exp3Six,
                 PolicyVariant::GraphExp3Ix}) {
    CHECK(parse_variant(to_string(v)) == v);
  }
  CHECK_THROWS_AS(parse_variant("ucb"), ConfigError);
}

TEST_CASE("config parsing") {
  const auto cfg = parse_config(R"({
    "environment": {"kind": "shift_bernoulli", "gap": 0.05},
    "policies": [
      {"variant": "exp3ix", "multipliers": [0.1, 1, 10]},
      {"variant": "exp3six", "switches": 2, "label": "six"}
    ],
    "horizon": 500, "runs": 4, "seed": 9, "checkpoints": [100, 500],
    "threads": 2, "delta": 0.1, "output": "res"
  })");
  CHECK(cfg.environment.gap == 0.05);
  REQUIRE(cfg.policies.size() == 2);
  CHECK(cfg.policies[0].multipliers == std::vector<double>{0.1, 1, 10});
  CHECK(cfg.policies[1].label == "six");
  CHECK(cfg.policies[1].switches == 2u);
  CHECK(cfg.horizon == 500);
  CHECK(cfg.runs == 4);
  CHECK(cfg.seed == 9);
  CHECK(cfg.checkpoints == std::vector<std::size_t>{100, 500});
  CHECK(cfg.threads == 2);
  CHECK(cfg.delta == 0.1);
  CHECK(cfg.output_dir == "res");
}

TEST_CASE("config errors point at the offending line and field") {
  auto e = error_of("{\n  \"environment\": {\"kind\": \"shift_bernoulli\"},\n"
                    "  \"policies\": [],\n  \"horizon\": 10\n}");
  CHECK(contains(e, "cfg.json:3:"));
  CHECK(contains(e, "policies"));

  e = error_of("{\n  \"environment\": {\"kind\": \"shift_bernoulli\"},\n"
               "  \"policies\": [{\"variant\": \"exp3ix\",\n"
               "                 \"multipliers\": [1, -2]}],\n  \"horizon\": 10\n}");
  CHECK(contains(e, "cfg.json:4:"));
  CHECK(contains(e, "policies[0].multipliers[1]"));

  e = error_of("{\n  \"environment\": {\"kind\": \"shift_bernoulli\"},\n"
               "  \"policies\": [{\"variant\": \"exp3ix\"}],\n  \"horizon\": 10,\n"
               "  \"colour\": 1\n}");
  CHECK(contains(e, "cfg.json:5:"));
  CHECK(contains(e, "colour: unknown field"));

  e = error_of("{\n  \"environment\": {\"kind\": \"shift_bernoulli\"},\n"
               "  \"policies\": [{\"variant\": \"exp9\"}],\n  \"horizon\": 10\n}");
  CHECK(contains(e, "cfg.json:3:"));
  CHECK(contains(e, "unknown policy variant"));

  e = error_of("{\n  \"environment\": {\"kind\": \"shift_bernoulli\"},\n  \"horizon\": ,\n}");
  CHECK(contains(e, "cfg.json:3:"));

  e = error_of(R"({"environment": {"kind": "shift_bernoulli"},
    "policies": [{"variant": "exp3ix"}], "horizon": 10, "checkpoints": [5, 5]})");
  CHECK(contains(e, "checkpoints[1]"));

  e = error_of(R"({"environment": {"kind": "shift_bernoulli"},
    "policies": [{"variant": "exp3ix"}, {"variant": "exp3ix"}], "horizon": 10})");
  CHECK(contains(e, "duplicate policy label"));

  e = error_of(R"({"environment": {"kind": "shift_bernoulli"},
    "policies": [{"variant": "exp3six"}], "horizon": 10})");
  CHECK(contains(e, "switches"));

  CHECK(contains(error_of(R"({"policies": [], "horizon": 1})"), "environment"));
  CHECK(contains(error_of("[]"), "expected an object"));
}

TEST_CASE("config files resolve data paths relative to themselves") {
  const auto dir = scratch("paths");
  {
    std::ofstream(dir / "losses.csv") << "0,1\n1,0\n0,1\n";
    std::ofstream(dir / "cfg.json")
        << R"({"environment": {"kind": "oblivious_csv", "path": "losses.csv"},
               "policies": [{"variant": "exp3ix"}], "horizon": 3})";
  }
  const auto cfg = load_config((dir / "cfg.json").string());
  CHECK(fs::equivalent(cfg.environment.path, dir / "losses.csv"));
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), IoError);
  fs::remove_all(dir);
}

TEST_CASE("runs are deterministic and independent of the thread count") {
  auto cfg = small_config();
  const auto a = run_experiment(cfg).summary;
  const auto b = run_experiment(cfg).summary;
  cfg.threads = 3;
  const auto c = run_experiment(cfg).summary;
  REQUIRE(a.raw.size() == 3 * 3 * 2);
  for (std::size_t i = 0; i < a.raw.size(); ++i) {
    CHECK(a.raw[i].regret == b.raw[i].regret);
    CHECK(a.raw[i].regret == c.raw[i].regret);
  }
  CHECK(a.pseudo.size() == a.raw.size());
  cfg.seed = 12;
  const auto d = run_experiment(cfg).summary;
  bool differs = false;
  for (std::size_t i = 0; i < a.raw.size(); ++i) differs |= a.raw[i].regret != d.raw[i].regret;
  CHECK(differs);
}

TEST_CASE("summary rows come in a stable order") {
  const auto s = run_experiment(small_config()).summary;
  REQUIRE(s.aggregate.size() == 3 * 2);
  CHECK(s.aggregate[0].policy == "exp3ix");
  CHECK(s.aggregate[0].multiplier == 0.5);
  CHECK(s.aggregate[0].checkpoint == 50);
  CHECK(s.aggregate[1].checkpoint == 200);
  CHECK(s.aggregate[2].multiplier == 2.0);
  CHECK(s.aggregate[4].policy == "exp3");
  for (const auto& a : s.aggregate) CHECK(a.n == 3);
}

TEST_CASE("regret at a checkpoint matches a recomputation from the trace") {
  auto cfg = small_config();
  cfg.runs = 2;
  const auto res = run_experiment(cfg, {true});
  REQUIRE(res.records.size() == 3 * 2);
  for (std::size_t j = 0; j < res.records.size(); ++j) {
    const auto& rec = res.records[j];
    for (std::size_t c = 0; c < 2; ++c) {
      const std::size_t cp = cfg.checkpoints[c];
      double learner = 0.0;
      std::vector<double> arms(10, 0.0);
      for (std::size_t t = 0; t < cp; ++t) {
        learner += rec.incurred[t];
        for (Arm i = 0; i < 10; ++i) arms[i] += rec.losses->at(t, i);
      }
      const double best = *std::min_element(arms.begin(), arms.end());
      CHECK(res.summary.raw[j * 2 + c].regret == doctest::Approx(learner - best).epsilon(1e-12));
    }
  }
}

TEST_CASE("aggregates: mean and sample std") {
  std::vector<RegretRow> rows{{"a", 1.0, 10, 0, 1.0}, {"a", 1.0, 10, 1, 2.0},
                              {"a", 1.0, 10, 2, 6.0}, {"b", 1.0, 10, 0, 4.0}};
  const auto agg = aggregate_rows(rows);
  REQUIRE(agg.size() == 2);
  CHECK(agg[0].mean == 3.0);
  CHECK(agg[0].std == doctest::Approx(std::sqrt(7.0)));
  CHECK(agg[0].n == 3);
  CHECK(agg[1].std == 0.0);
}

TEST_CASE("percentile interpolates between order statistics") {
  RunSummary s;
  for (std::size_t r = 0; r < 5; ++r) {
    s.raw.push_back({"p", 1.0, 1, r, static_cast<double>(4 - r)});
  }
  CHECK(s.percentile("p", 1.0, 1, 0.0) == 0.0);
  CHECK(s.percentile("p", 1.0, 1, 1.0) == 4.0);
  CHECK(s.percentile("p", 1.0, 1, 0.5) == 2.0);
  CHECK(s.percentile("p", 1.0, 1, 0.95) == doctest::Approx(3.8));
  CHECK_THROWS_AS(s.percentile("q", 1.0, 1, 0.5), ConfigError);
  CHECK_THROWS_AS(s.percentile("p", 1.0, 1, 1.5), ConfigError);
}

TEST_CASE("CSV round trip reproduces the aggregates") {
  const auto s = run_experiment(small_config()).summary;
  std::stringstream raw_io, agg_io;
  write_raw_csv(s.raw, raw_io);
  write_aggregate_csv(s.aggregate, agg_io);
  const auto raw = parse_raw_csv(raw_io);
  const auto agg = parse_aggregate_csv(agg_io);
  REQUIRE(raw.size() == s.raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(raw[i].policy == s.raw[i].policy);
    CHECK(raw[i].multiplier == s.raw[i].multiplier);
    CHECK(raw[i].regret == s.raw[i].regret);
  }
  const auto recomputed = aggregate_rows(raw);
  REQUIRE(recomputed.size() == agg.size());
  for (std::size_t i = 0; i < agg.size(); ++i) {
    CHECK(std::abs(recomputed[i].mean - agg[i].mean) <= 1e-9);
    CHECK(std::abs(recomputed[i].std - agg[i].std) <= 1e-9);
    CHECK(recomputed[i].n == agg[i].n);
  }
}

TEST_CASE("CSV edge cases") {
  std::stringstream empty;
  write_raw_csv({}, empty);
  const std::string text = empty.str();
  CHECK(std::count(text.begin(), text.end(), '\n') == 1);
  CHECK(parse_raw_csv(empty).empty());

  std::stringstream bad_header("nope\n");
  CHECK_THROWS_AS(parse_raw_csv(bad_header), ConfigError);

  std::stringstream roundtrip;
  write_raw_csv({{"a,b \"c\"", 0.1, 5, 0, -1.5}}, roundtrip);
  const auto back = parse_raw_csv(roundtrip);
  REQUIRE(back.size() == 1);
  CHECK(back[0].policy == "a,b \"c\"");
  CHECK(back[0].multiplier == 0.1);
}

TEST_CASE("format_number is the shortest round-tripping form") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(-2.5) == "-2.5");
  testgen::Gen g(3);
  for (int i = 0; i < 200; ++i) {
    const double x = g.range(-1e6, 1e6);
    CHECK(std::stod(format_number(x)) == x);
  }
}

TEST_CASE("emit_csv writes the expected files") {
  const auto dir = scratch("emit");
  const auto s = run_experiment(small_config()).summary;
  const auto files = emit_csv(s, dir);
  CHECK(files.size() == 3);
  CHECK(fs::exists(dir / "regret_raw.csv"));
  CHECK(fs::exists(dir / "regret_summary.csv"));
  CHECK(fs::exists(dir / "pseudo_regret_raw.csv"));
  fs::remove_all(dir);
}

namespace {

std::size_t occurrences(const std::string& s, std::string_view part) {
  std::size_t n = 0;
  for (auto pos = s.find(part); pos != std::string::npos; pos = s.find(part, pos + 1)) ++n;
  return n;
}

}  // namespace

TEST_CASE("plot output") {
  RunSummary single;
  single.raw.push_back({"only", 1.0, 10, 0, 3.0});
  single.aggregate = aggregate_rows(single.raw);
  const auto one = render_plot(single);
  CHECK(contains(one, "<svg xmlns"));
  CHECK(contains(one, "</svg>"));
  CHECK(occurrences(one, "class=\"marker\"") == 1);
  CHECK(contains(one, "only"));

  auto cfg = small_config();
  PolicySpec third;
  third.variant = PolicyVariant::Exp3P;
  third.label = "p<&>";
  third.multipliers = {0.5, 2.0};
  cfg.policies.push_back(third);
  const auto three = render_plot(run_experiment(cfg).summary);
  CHECK(occurrences(three, "<polyline") >= 3);
  // 2 + 1 + 2 cells per checkpoint, two checkpoints.
  CHECK(occurrences(three, "class=\"marker\"") == 10);
  CHECK(contains(three, "p&lt;&amp;&gt;"));
  CHECK_FALSE(contains(three, "nan"));
  CHECK_THROWS_AS(render_plot(RunSummary{}), ConfigError);
}

TEST_CASE("oblivious CSV environments") {
  const auto dir = scratch("csv_env");
  {
    std::ofstream out(dir / "losses.csv");
    for (int t = 0; t < 100; ++t) out << (t % 2) << ",0.5,1\n";
  }
  ExperimentConfig cfg;
  cfg.environment.kind = EnvironmentKind::ObliviousCsv;
  cfg.environment.path = (dir / "losses.csv").string();
  cfg.horizon = 100;
  cfg.runs = 2;
  PolicySpec p;
  p.variant = PolicyVariant::Exp3Ix;
  cfg.policies = {p};
  const auto s = run_experiment(cfg).summary;
  CHECK(s.pseudo.empty());
  REQUIRE(s.raw.size() == 4);
  for (const auto& r : s.raw) {
    CHECK(r.regret >= -1e-12 - 0.5 * r.checkpoint);
    CHECK(r.regret <= 0.5 * r.checkpoint + 1e-12);
  }
  cfg.horizon = 101;
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
  fs::remove_all(dir);
}

TEST_CASE("every variant can be built and run from a config") {
  ExperimentConfig cfg;
  cfg.horizon = 100;
  cfg.runs = 1;
  PolicySpec a;
  a.variant = PolicyVariant::Exp4Ix;
  a.advice = AdviceKind::Random;
  a.experts = 5;
  PolicySpec b;
  b.variant = PolicyVariant::Exp3Six;
  b.switches = 2;
  PolicySpec c;
  c.variant = PolicyVariant::GraphExp3Ix;
  c.graph = "complete";
  PolicySpec d;
  d.variant = PolicyVariant::Exp3Ix;
  d.schedule = ScheduleKind::Anytime;
  d.label = "anytime";
  PolicySpec e;
  e.variant = PolicyVariant::Exp3P;
  e.multipliers = {100.0};
  cfg.policies = {a, b, c, d, e};
  const auto s = run_experiment(cfg).summary;
  CHECK(s.raw.size() == 5 * 2);
  for (const auto& r : s.raw) CHECK(std::isfinite(r.regret));

  PolicySpec bad;
  bad.variant = PolicyVariant::Exp3Six;
  cfg.policies = {bad};
  CHECK_THROWS_AS(run_experiment(cfg), ConfigError);
}

TEST_CASE("sweep configuration") {
  const auto m = sweep_multipliers();
  REQUIRE(m.size() == 9);
  CHECK(m.front() == doctest::Approx(0.01));
  CHECK(m[4] == 1.0);
  CHECK(m.back() == doctest::Approx(100.0));
  const auto cfg = sweep_config(1000, 2, 5);
  CHECK(cfg.policies.size() == 3);
  CHECK_NOTHROW(cfg.validate());
}
