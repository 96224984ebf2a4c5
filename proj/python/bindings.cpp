#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ixbandit/bounds.hpp"
#include "ixbandit/comparators.hpp"
#include "ixbandit/concentration.hpp"
#include "ixbandit/estimators.hpp"
#include "ixbandit/graphs.hpp"
#include "ixbandit/runner.hpp"

namespace py = pybind11;
using namespace ixbandit;

namespace {

LossMatrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw ConfigError("loss matrix needs at least one row");
  const std::size_t k = rows[0].size();
  std::vector<double> flat;
  flat.reserve(rows.size() * k);
  for (const auto& r : rows) {
    if (r.size() != k) throw ConfigError("ragged loss matrix");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return LossMatrix(rows.size(), k, std::move(flat));
}

FeedbackGraph to_graph(std::size_t nodes,
                       const std::vector<std::pair<Arm, Arm>>& arcs) {
  FeedbackGraph g(nodes);
  for (auto [from, to] : arcs) g.add_arc(from, to);
  return g;
}

BoundSpec bound_spec(std::size_t arms, std::size_t horizon, double delta) {
  BoundSpec s;
  s.arms = arms;
  s.horizon = horizon;
  s.delta = delta;
  return s;
}

py::dict estimate_dict(const MonteCarloEstimate& e) {
  py::dict d;
  d["value"] = e.value;
  d["stderr"] = e.std_error;
  d["replications"] = e.replications;
  d["threshold"] = e.threshold;
  d["passed"] = e.pass;
  return d;
}

EstimatorKind estimator_kind(const std::string& name) {
  if (name == "ix") return EstimatorKind::Ix;
  if (name == "alt-a") return EstimatorKind::IxAltA;
  if (name == "alt-log") return EstimatorKind::IxAltLog;
  throw ConfigError("estimator must be ix, alt-a or alt-log");
}

ProcessSpec process_spec(std::size_t arms, std::size_t horizon,
                         const std::string& losses, const std::string& sampling) {
  ProcessSpec p;
  p.arms = arms;
  p.horizon = horizon;
  if (losses == "zero") p.losses = LossProcess::Zero;
  else if (losses == "iid") p.losses = LossProcess::IidBernoulli;
  else if (losses == "uniform") p.losses = LossProcess::IidUniform;
  else if (losses == "spiky") p.losses = LossProcess::AdaptiveSpiky;
  else throw ConfigError("losses must be zero, iid, uniform or spiky");
  if (sampling == "uniform") p.sampling = SamplingRule::Uniform;
  else if (sampling == "exp") p.sampling = SamplingRule::ExponentialWeights;
  else throw ConfigError("sampling must be uniform or exp");
  return p;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Adversarial bandits with implicit-exploration loss estimates";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("estimate_ix", [](Arm arm, double loss, std::vector<double> p, double gamma) {
    return estimate_ix(Observation(arm, loss, p), gamma);
  }, py::arg("arm"), py::arg("loss"), py::arg("probs"), py::arg("gamma"));
  m.def("estimate_importance", [](Arm arm, double loss, std::vector<double> p) {
    return estimate_importance(Observation(arm, loss, p));
  }, py::arg("arm"), py::arg("loss"), py::arg("probs"));
  m.def("estimate_ix_alt_a", [](Arm arm, double loss, std::vector<double> p, double gamma) {
    return estimate_ix_alt_a(Observation(arm, loss, p), gamma);
  }, py::arg("arm"), py::arg("loss"), py::arg("probs"), py::arg("gamma"));
  m.def("estimate_ix_alt_log", [](Arm arm, double loss, std::vector<double> p, double gamma) {
    return estimate_ix_alt_log(Observation(arm, loss, p), gamma);
  }, py::arg("arm"), py::arg("loss"), py::arg("probs"), py::arg("gamma"));
  m.def("estimate_biased_reward", [](Arm arm, double loss, std::vector<double> p, double beta) {
    return estimate_biased_reward(Observation(arm, loss, p), beta);
  }, py::arg("arm"), py::arg("loss"), py::arg("probs"), py::arg("beta"));
  m.def("softmax_from_losses", [](std::vector<double> l, double eta) {
    return softmax_from_losses(l, eta).vector();
  }, py::arg("cumulative"), py::arg("eta"));

  m.def("bound_thm1_fixed", [](std::size_t k, std::size_t t, double d) {
    return bound_thm1_fixed(bound_spec(k, t, d));
  }, py::arg("arms"), py::arg("horizon"), py::arg("delta"));
  m.def("bound_thm1_anytime", [](std::size_t k, std::size_t t, double d) {
    return bound_thm1_anytime(bound_spec(k, t, d));
  }, py::arg("arms"), py::arg("horizon"), py::arg("delta"));
  m.def("bound_thm2", [](std::size_t k, std::size_t t, double d, std::size_t n) {
    auto s = bound_spec(k, t, d);
    s.experts = n;
    return bound_thm2(s);
  }, py::arg("arms"), py::arg("horizon"), py::arg("delta"), py::arg("experts"));
  m.def("bound_thm3", [](std::size_t k, std::size_t t, double d, std::size_t sw) {
    auto s = bound_spec(k, t, d);
    s.switches = sw;
    return bound_thm3(s);
  }, py::arg("arms"), py::arg("horizon"), py::arg("delta"), py::arg("switches"));
  m.def("bound_thm4", [](std::size_t k, std::size_t t, double d, std::size_t a) {
    auto s = bound_spec(k, t, d);
    s.independence = a;
    return bound_thm4(s);
  }, py::arg("arms"), py::arg("horizon"), py::arg("delta"), py::arg("independence"));

  m.def("best_switching_value", [](const std::vector<std::vector<double>>& rows,
                                   std::size_t switches) {
    const auto v = best_switching_value(to_matrix(rows), switches, true);
    return py::make_tuple(v.value, v.witness);
  }, py::arg("losses"), py::arg("switches"),
     "Returns (value, witness) with 0-based arms.");
  m.def("independence_number", [](std::size_t nodes,
                                  const std::vector<std::pair<Arm, Arm>>& arcs) {
    return independence_number(to_graph(nodes, arcs), IndependenceMode::Exact).value;
  }, py::arg("nodes"), py::arg("arcs"));
  m.def("observation_probs", [](std::size_t nodes,
                                const std::vector<std::pair<Arm, Arm>>& arcs,
                                std::vector<double> p) {
    return observation_probs(to_graph(nodes, arcs), p);
  }, py::arg("nodes"), py::arg("arcs"), py::arg("probs"));

  m.def("verify_corollary1", [](std::size_t arms, std::size_t horizon, double gamma,
                                double delta, std::size_t reps, const std::string& losses,
                                const std::string& sampling, const std::string& est,
                                std::uint64_t seed) {
    const ProcessSpec spec = process_spec(arms, horizon, losses, sampling);
    const EstimatorKind kind = estimator_kind(est);
    MonteCarloEstimate r;
    {
      py::gil_scoped_release release;
      r = verify_corollary1(spec, gamma, delta, reps, kind, {seed, 1});
    }
    return estimate_dict(r);
  }, py::arg("arms"), py::arg("horizon"), py::arg("gamma"), py::arg("delta"),
     py::arg("replications"), py::arg("losses") = "spiky", py::arg("sampling") = "exp",
     py::arg("estimator") = "ix", py::arg("seed") = 0);
  m.def("verify_supermartingale", [](std::size_t arms, std::size_t horizon, double gamma,
                                     std::size_t reps, const std::string& losses,
                                     const std::string& sampling, const std::string& est,
                                     std::uint64_t seed) {
    const ProcessSpec spec = process_spec(arms, horizon, losses, sampling);
    const EstimatorKind kind = estimator_kind(est);
    MonteCarloEstimate r;
    {
      py::gil_scoped_release release;
      r = verify_supermartingale(spec, gamma, reps, kind, std::nullopt, {seed, 1});
    }
    return estimate_dict(r);
  }, py::arg("arms"), py::arg("horizon"), py::arg("gamma"), py::arg("replications"),
     py::arg("losses") = "uniform", py::arg("sampling") = "uniform",
     py::arg("estimator") = "ix", py::arg("seed") = 0);

  m.def("run_experiment", [](const std::string& config_json) {
    const ExperimentConfig cfg = parse_config(config_json, "<string>");
    ExperimentResult res;
    {
      py::gil_scoped_release release;
      res = run_experiment(cfg);
    }
    py::list raw, agg;
    for (const auto& r : res.summary.raw) {
      raw.append(py::dict(py::arg("policy") = r.policy, py::arg("multiplier") = r.multiplier,
                          py::arg("checkpoint") = r.checkpoint, py::arg("run") = r.run,
                          py::arg("regret") = r.regret));
    }
    for (const auto& a : res.summary.aggregate) {
      agg.append(py::dict(py::arg("policy") = a.policy, py::arg("multiplier") = a.multiplier,
                          py::arg("checkpoint") = a.checkpoint, py::arg("mean") = a.mean,
                          py::arg("std") = a.std, py::arg("n") = a.n));
    }
    py::dict out;
    out["raw"] = raw;
    out["aggregate"] = agg;
    return out;
  }, py::arg("config_json"), "Run a JSON experiment config; returns raw and aggregate rows.");
}
