#include <doctest.h>

#include <cmath>
#include <memory>
#include <numeric>

#include "ixbandit/policies.hpp"
#include "support.hpp"

using namespace ixbandit;

namespace {

struct Trace {
  std::vector<Arm> arms;
  std::vector<std::vector<double>> probs;
};

Trace play(Policy& policy, const LossMatrix& losses, Rng rng) {
  Trace tr;
  for (std::size_t t = 0; t < losses.horizon(); ++t) {
    tr.probs.push_back(policy.distribution().vector());
    tr.arms.push_back(policy.step(rng, losses.row(t)).arm);
  }
  return tr;
}

}  // namespace

TEST_CASE("one EXP3-IX round touches only the played arm") {
  PolicyState st(3, Schedule::fixed(0.5, 0.25));
  Rng rng(1, 0);
  const std::vector<double> losses{0.3, 0.6, 0.9};
  const auto p = softmax_from_losses(st.cumulative, 0.5);
  const auto res = exp3ix_round(st, 0.25, 0.5, rng, losses);
  CHECK(st.round == 2);
  CHECK(res.loss == losses[res.arm]);
  for (Arm i = 0; i < 3; ++i) {
    if (i == res.arm) {
      CHECK(st.cumulative[i] == doctest::Approx(losses[i] / (p[i] + 0.25)));
    } else {
      CHECK(st.cumulative[i] == 0.0);
    }
  }
}

TEST_CASE("anytime parameters") {
  const auto [eta, gamma] = exp3ix_anytime_params(1, 10, 1.0);
  CHECK(eta == doctest::Approx(0.479852).epsilon(1e-5));
  CHECK(gamma == doctest::Approx(eta / 2));
  const auto [eta4, gamma4] = exp3ix_anytime_params(4, 10, 2.0);
  CHECK(eta4 == doctest::Approx(eta));
  CHECK(gamma4 == doctest::Approx(gamma));
  CHECK_THROWS_AS(exp3ix_anytime_params(1, 1), ConfigError);
  CHECK_THROWS_AS(exp3ix_anytime_params(0, 3), ConfigError);
  CHECK_THROWS_AS(exp3ix_anytime_params(1, 3, 0.0), ConfigError);
}

TEST_CASE("EXP3-IX with gamma = 0 reproduces EXP3 exactly") {
  testgen::Gen g(41);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto losses = g.matrix(300, 5);
    Exp3Policy a(5, Schedule::fixed(0.3, 0.0));
    Exp3IxPolicy b(5, Schedule::fixed(0.3, 0.0));
    const auto ta = play(a, losses, Rng(seed, 1));
    const auto tb = play(b, losses, Rng(seed, 1));
    CHECK(ta.arms == tb.arms);
    CHECK(ta.probs == tb.probs);
    CHECK(a.state().cumulative == b.state().cumulative);
  }
}

TEST_CASE("graph EXP3-IX on the empty graph reproduces EXP3-IX exactly") {
  testgen::Gen g(42);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto losses = g.matrix(300, 6);
    Exp3IxPolicy a(6, Schedule::fixed(0.2, 0.1));
    GraphExp3IxPolicy b(std::make_shared<FeedbackGraph>(FeedbackGraph::empty(6)),
                        Schedule::fixed(0.2, 0.1));
    CHECK(play(a, losses, Rng(seed, 1)).arms == play(b, losses, Rng(seed, 1)).arms);
    CHECK(a.state().cumulative == b.state().cumulative);
  }
}

TEST_CASE("graph EXP3-IX observes out-neighbours") {
  auto graph = std::make_shared<FeedbackGraph>(FeedbackGraph::complete(4));
  GraphExp3IxPolicy pol(graph, Schedule::fixed(0.5, 0.25));
  Rng rng(3, 3);
  const std::vector<double> losses{0.1, 0.2, 0.3, 0.4};
  pol.step(rng, losses);
  CHECK(pol.last_observed().size() == 4);
  // On the complete graph o_i = 1, so every arm gets l_i / (1 + gamma).
  for (Arm i = 0; i < 4; ++i) {
    CHECK(pol.state().cumulative[i] == doctest::Approx(losses[i] / 1.25));
  }
  CHECK_THROWS_AS(GraphExp3IxPolicy(nullptr, Schedule::fixed(0.5, 0.25)), ConfigError);
  PolicyState wrong(3, Schedule::fixed(0.5, 0.25));
  CHECK_THROWS_AS(exp3ix_graph_round(wrong, *graph, 0.5, 0.25, rng, losses),
                  ConfigError);
}

TEST_CASE("Fixed-Share conserves mass and reduces to exponential weights") {
  testgen::Gen g(43);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t k = g.between(2, 15);
    std::vector<double> w(k), est(k);
    for (Arm i = 0; i < k; ++i) {
      w[i] = std::exp(g.range(-20.0, 0.0));
      est[i] = g.coin(0.3) ? g.range(0.0, 50.0) : 0.0;
    }
    const double eta = g.range(1e-3, 1.0);
    const double alpha = g.unit();
    double v_total = 0.0;
    for (Arm i = 0; i < k; ++i) v_total += w[i] * std::exp(-eta * est[i]);
    const auto out = fixed_share_update(w, est, eta, alpha);
    const double out_total = std::accumulate(out.begin(), out.end(), 0.0);
    CHECK(std::abs(out_total - v_total) <= 1e-12 * v_total);
    const auto plain = fixed_share_update(w, est, eta, 0.0);
    for (Arm i = 0; i < k; ++i) CHECK(plain[i] == w[i] * std::exp(-eta * est[i]));
    const auto flat = fixed_share_update(w, est, eta, 1.0);
    for (Arm i = 0; i < k; ++i) CHECK(flat[i] == doctest::Approx(v_total / k));
  }
  const std::vector<double> w{0.5, 0.5}, e{1.0};
  CHECK_THROWS_AS(fixed_share_update(w, e, 0.1, 0.0), ConfigError);
  CHECK_THROWS_AS(fixed_share_update(w, w, 0.1, 1.5), ConfigError);
}

TEST_CASE("EXP3-SIX with alpha = 0 follows EXP3-IX") {
  testgen::Gen g(44);
  const auto losses = g.matrix(400, 4);
  Exp3IxPolicy a(4, Schedule::fixed(0.3, 0.15));
  Exp3SixPolicy b(4, Schedule::fixed(0.3, 0.15), 0.0);
  const auto ta = play(a, losses, Rng(8, 1));
  const auto tb = play(b, losses, Rng(8, 1));
  CHECK(ta.arms == tb.arms);
  for (std::size_t t = 0; t < ta.probs.size(); ++t) {
    for (Arm i = 0; i < 4; ++i) {
      CHECK(ta.probs[t][i] == doctest::Approx(tb.probs[t][i]).epsilon(1e-7));
    }
  }
  CHECK_THROWS_AS(Exp3SixPolicy(4, Schedule::fixed(0.3, 0.15), 1.1), ConfigError);
}

TEST_CASE("EXP3-SIX keeps every arm above alpha/K after the share step") {
  testgen::Gen g(45);
  const auto losses = g.matrix(500, 5, true);
  Exp3SixPolicy pol(5, Schedule::fixed(2.0, 1.0), 0.05);
  Rng rng(2, 2);
  for (std::size_t t = 0; t < losses.horizon(); ++t) {
    pol.step(rng, losses.row(t));
    for (double w : pol.weights()) CHECK(w >= 0.05 / 5 * (1 - 1e-12));
    CHECK(std::accumulate(pol.weights().begin(), pol.weights().end(), 0.0) ==
          doctest::Approx(1.0));
  }
}

TEST_CASE("EXP3.P mixes in uniform exploration") {
  Exp3PState st(4);
  st.cumulative_reward = {10.0, 0.0, 5.0, 1.0};
  const auto p = exp3p_distribution(st, 0.5, 0.2);
  for (Arm i = 0; i < 4; ++i) CHECK(p[i] >= 0.2 / 4 - 1e-15);
  CHECK(p[0] > p[2]);
  const auto u = exp3p_distribution(st, 0.5, 1.0);
  for (Arm i = 0; i < 4; ++i) CHECK(u[i] == doctest::Approx(0.25));
  Rng rng(1, 1);
  const std::vector<double> losses{0.0, 1.0, 0.5, 0.5};
  const auto before = st.cumulative_reward;
  const auto p_now = exp3p_distribution(st, 0.5, 0.2);
  const auto res = exp3p_round(st, 0.5, 0.2, 0.1, rng, losses);
  for (Arm i = 0; i < 4; ++i) {
    const double expect = before[i] + 0.1 / p_now[i] +
                          (i == res.arm ? (1.0 - losses[i]) / p_now[i] : 0.0);
    CHECK(st.cumulative_reward[i] == doctest::Approx(expect));
  }
  CHECK_THROWS_AS(Exp3PPolicy(4, {0.0, 0.1, 0.1}), ConfigError);
  CHECK_THROWS_AS(Exp3PPolicy(4, {0.1, 1.5, 0.1}), ConfigError);
  CHECK_THROWS_AS(Exp3PPolicy(4, {0.1, 0.1, 0.0}), ConfigError);
}

TEST_CASE("EXP4-IX with one expert per arm follows EXP3-IX") {
  testgen::Gen g(46);
  const auto losses = g.matrix(300, 5);
  const auto advice = ExpertAdvice::point_masses(5);
  Exp3IxPolicy a(5, Schedule::fixed(0.3, 0.15));
  Exp4IxPolicy b(5, 5, Schedule::fixed(0.3, 0.15),
                 [advice](std::size_t) { return advice; });
  const auto ta = play(a, losses, Rng(4, 1));
  const auto tb = play(b, losses, Rng(4, 1));
  CHECK(ta.arms == tb.arms);
  for (Arm i = 0; i < 5; ++i) {
    CHECK(a.state().cumulative[i] ==
          doctest::Approx(b.state().expert_cumulative[i]).epsilon(1e-12));
  }
}

TEST_CASE("EXP4-IX mixes advice and credits experts by their weight on the played arm") {
  const ExpertAdvice adv(2, 3, {0.5, 0.5, 0.0, 0.0, 0.2, 0.8});
  Exp4State st(3, 2);
  st.expert_cumulative = {1.0, 0.0};
  const double eta = 0.7;
  const auto p = exp4ix_distribution(st, adv, eta);
  const double z = std::exp(-0.7) + 1.0;
  const double pi0 = std::exp(-0.7) / z, pi1 = 1.0 / z;
  CHECK(p[0] == doctest::Approx(0.5 * pi0));
  CHECK(p[1] == doctest::Approx(0.5 * pi0 + 0.2 * pi1));
  CHECK(p[2] == doctest::Approx(0.8 * pi1));
  Rng rng(0, 0);
  const std::vector<double> losses{1.0, 1.0, 1.0};
  const auto res = exp4ix_round(st, adv, eta, 0.1, rng, losses);
  const double est = 1.0 / (p[res.arm] + 0.1);
  CHECK(st.expert_cumulative[0] == doctest::Approx(1.0 + adv.at(0, res.arm) * est));
  CHECK(st.expert_cumulative[1] == doctest::Approx(adv.at(1, res.arm) * est));
  const ExpertAdvice wrong(2, 2, {1, 0, 0, 1});
  CHECK_THROWS_AS(exp4ix_distribution(st, wrong, eta), ConfigError);
  CHECK_THROWS_AS(ExpertAdvice(2, 2, {0.5, 0.6, 1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(ExpertAdvice(2, 2, {1.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(Exp4IxPolicy(3, 2, Schedule::fixed(0.1, 0.05), nullptr), ConfigError);
}

TEST_CASE("policies reject malformed loss vectors") {
  Exp3IxPolicy pol(3, Schedule::fixed(0.1, 0.05));
  Rng rng(0, 0);
  CHECK_THROWS_AS(pol.step(rng, std::vector<double>{0.1, 0.2}), ConfigError);
  CHECK_THROWS_AS(pol.step(rng, std::vector<double>{0.1, 0.2, 1.2}), ConfigError);
  CHECK(pol.round() == 1);
  CHECK_THROWS_AS(Exp3IxPolicy(0, Schedule::fixed(0.1, 0.05)), ConfigError);
}

TEST_CASE("policies are deterministic given the generator") {
  testgen::Gen g(47);
  const auto losses = g.matrix(200, 7);
  std::vector<std::unique_ptr<Policy>> a, b;
  for (auto* v : {&a, &b}) {
    v->push_back(std::make_unique<Exp3Policy>(7, Schedule::anytime(0.5, 0.0)));
    v->push_back(std::make_unique<Exp3IxPolicy>(7, Schedule::anytime(0.5, 0.25)));
    v->push_back(std::make_unique<Exp3PPolicy>(7, Exp3PParams{0.05, 0.3, 0.05}));
    v->push_back(std::make_unique<Exp3SixPolicy>(7, Schedule::fixed(0.2, 0.1), 0.01));
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(play(*a[i], losses, Rng(5, 5)).arms == play(*b[i], losses, Rng(5, 5)).arms);
    CHECK(a[i]->round() == losses.horizon() + 1);
  }
}

TEST_CASE("EXP3-IX concentrates on a clearly better arm") {
  LossMatrix m(3000, 3);
  for (std::size_t t = 0; t < 3000; ++t) {
    m.set(t, 0, 0.9);
    m.set(t, 1, 0.1);
    m.set(t, 2, 0.9);
  }
  Exp3IxPolicy pol(3, Schedule::fixed(0.1, 0.05));
  const auto tr = play(pol, m, Rng(1, 1));
  CHECK(pol.distribution()[1] > 0.95);
}
